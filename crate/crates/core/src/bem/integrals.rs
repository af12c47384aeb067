//! Panel-pair integrals of the scalar kernel e^{-kr}/r against RWG-type
//! linear functions.
//!
//! For panels a, b with vertices v_i, w_j the local quantities are
//!
//! * S = ∫_a∫_b g,
//! * V_ij = ∫_a∫_b (x - v_i)·(y - w_j) g,
//! * X_ij = ∫_a∫_b (x - v_i)·(∇_x g × (y - w_j)).
//!
//! Far pairs use product rules through moment sums; near pairs integrate
//! 1/r analytically over the inner panel and the bounded remainder
//! g - 1/r numerically.

use crate::green::radial;
use crate::quad::TriangleRule;
use crate::vec3::{add, axpy, cross, dot, norm, scale, sub, Vec3};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Local {
    pub s: f64,
    pub v: [[f64; 3]; 3],
    pub x: [[f64; 3]; 3],
}

/// Quadrature points of one panel: (point, weight × area).
pub type Points = Vec<(Vec3, f64)>;

pub fn panel_points(tri: &[Vec3; 3], area: f64, rule: &TriangleRule) -> Points {
    rule.points
        .iter()
        .map(|&[l0, l1, l2, w]| {
            let mut p = scale(tri[0], l0);
            axpy(&mut p, l1, tri[1]);
            axpy(&mut p, l2, tri[2]);
            (p, w * area)
        })
        .collect()
}

/// Weighted moment sums of a kernel value q(x, y) over point pairs.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    pub s0: f64,
    pub sx: Vec3,
    pub sy: Vec3,
    pub sxy: f64,
    /// Σ q y × x
    pub c: Vec3,
}

impl Moments {
    #[inline]
    pub fn add(&mut self, q: f64, x: Vec3, y: Vec3) {
        self.s0 += q;
        axpy(&mut self.sx, q, x);
        axpy(&mut self.sy, q, y);
        self.sxy += q * dot(x, y);
        axpy(&mut self.c, q, cross(y, x));
    }

    /// Σ q (x - v_i)·(y - w_j)
    pub fn linear(&self, va: &[Vec3; 3], vb: &[Vec3; 3]) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.sxy - dot(va[i], self.sy) - dot(vb[j], self.sx) + dot(va[i], vb[j]) * self.s0;
            }
        }
        out
    }

    /// Σ q (x - v_i)·((x - y) × (y - w_j)), i.e. X with ∇g = q (x - y).
    pub fn triple(&self, va: &[Vec3; 3], vb: &[Vec3; 3]) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let u = sub(va[i], vb[j]);
                out[i][j] = dot(u, self.c) + dot(vb[j], cross(self.sy, va[i])) - dot(va[i], cross(vb[j], self.sx));
            }
        }
        out
    }

    /// Σ q (x - v_i)·(t × (y - w_j)).
    pub fn fixed_cross(&self, t: Vec3, va: &[Vec3; 3], vb: &[Vec3; 3]) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                // (y - w)×(x - v) = y×x - y×v - w×x + w×v
                let mut b = self.c;
                b = sub(b, cross(self.sy, va[i]));
                b = sub(b, cross(vb[j], self.sx));
                axpy(&mut b, self.s0, cross(vb[j], va[i]));
                out[i][j] = dot(t, b);
            }
        }
        out
    }
}

/// Product-rule pair integral with regular kernel evaluation.
pub fn regular_pair(va: &[Vec3; 3], pa: &[(Vec3, f64)], vb: &[Vec3; 3], pb: &[(Vec3, f64)], k: f64) -> Local {
    let mut mg = Moments::default();
    let mut md = Moments::default();
    for &(x, wx) in pa {
        for &(y, wy) in pb {
            let r = norm(sub(x, y));
            let rd = radial(r, k);
            let w = wx * wy;
            mg.add(w * rd.g, x, y);
            md.add(w * rd.d1, x, y);
        }
    }
    Local { s: mg.s0, v: mg.linear(va, vb), x: md.triple(va, vb) }
}

/// Derivatives of a regular pair integral under a rigid shift of the
/// first panel along each coordinate axis.
pub fn regular_pair_grad(va: &[Vec3; 3], pa: &[(Vec3, f64)], vb: &[Vec3; 3], pb: &[(Vec3, f64)], k: f64) -> [Local; 3] {
    let mut md = Moments::default();
    let mut mt = [Moments::default(); 3];
    let mut m2 = [Moments::default(); 3];
    for &(x, wx) in pa {
        for &(y, wy) in pb {
            let d = sub(x, y);
            let r = norm(d);
            let rd = radial(r, k);
            let w = wx * wy;
            md.add(w * rd.d1, x, y);
            for t in 0..3 {
                // ∂_t g = d1 R_t; ∂_t ∇g = d1 e_t + d2 R_t R
                mt[t].add(w * rd.d1 * d[t], x, y);
                m2[t].add(w * rd.d2 * d[t], x, y);
            }
        }
    }
    std::array::from_fn(|t| {
        let mut e = [0.0; 3];
        e[t] = 1.0;
        let a = md.fixed_cross(e, va, vb);
        let b = m2[t].triple(va, vb);
        let mut x = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                x[i][j] = a[i][j] + b[i][j];
            }
        }
        Local { s: mt[t].s0, v: mt[t].linear(va, vb), x }
    })
}

/// ∫_T 1/R, ∫_T (y - x)/R and ∫_T ∇_x(1/R) over a flat triangle, R = |x - y|.
pub fn static_integrals(x: Vec3, tri: &[Vec3; 3], n: Vec3) -> (f64, Vec3, Vec3) {
    let d0 = dot(sub(x, tri[0]), n);
    let scale_len = norm(sub(tri[1], tri[0]));
    let d = if d0.abs() < 1e-12 * scale_len { 0.0 } else { d0 };
    let rho = sub(x, scale(n, d));
    let ad = d.abs();
    let mut i0 = 0.0;
    let mut ir = [0.0; 3];
    let mut ig = [0.0; 3];
    let mut beta = 0.0;
    for i in 0..3 {
        let a = tri[i];
        let b = tri[(i + 1) % 3];
        let l = norm(sub(b, a));
        let s = scale(sub(b, a), 1.0 / l);
        let m = cross(s, n);
        let lp = dot(sub(b, rho), s);
        let lm = dot(sub(a, rho), s);
        let p0 = dot(sub(a, rho), m);
        let r0s = p0 * p0 + d * d;
        let rp = norm(sub(x, b));
        let rm = norm(sub(x, a));
        let f = if lm >= 0.0 {
            let (num, den) = (rp + lp, rm + lm);
            if den > 0.0 && num > 0.0 { (num / den).ln() } else { 0.0 }
        } else {
            let (num, den) = (rm - lm, rp - lp);
            if den > 0.0 && num > 0.0 { (num / den).ln() } else { 0.0 }
        };
        beta += (p0 * lp).atan2(r0s + ad * rp) - (p0 * lm).atan2(r0s + ad * rm);
        i0 += p0 * f;
        axpy(&mut ir, 0.5 * (r0s * f + lp * rp - lm * rm), m);
        axpy(&mut ig, -f, m);
    }
    i0 -= ad * beta;
    axpy(&mut ir, -d * i0, n);
    let sgn = if d > 0.0 {
        1.0
    } else if d < 0.0 {
        -1.0
    } else {
        0.0
    };
    axpy(&mut ig, -sgn * beta, n);
    (i0, ir, ig)
}

/// (e^{-kr} - 1)/r and d/dr of it, bounded as r → 0.
#[inline]
fn remainder(r: f64, k: f64) -> (f64, f64) {
    let kr = k * r;
    if kr < 0.05 {
        // Σ_{n≥1} (-k)^n r^{n-1}/n! and its derivative
        let mut g = 0.0;
        let mut dg = 0.0;
        let mut term = -k; // (-k)^n r^{n-1}/n! at n = 1
        for n in 1..12 {
            g += term;
            if n >= 2 {
                dg += term * (n as f64 - 1.0) / r.max(f64::MIN_POSITIVE);
            }
            term *= -kr / (n as f64 + 1.0);
        }
        if r == 0.0 {
            dg = k * k / 2.0;
        }
        (g, dg)
    } else {
        let em = (-kr).exp_m1();
        (em / r, -(kr * (-kr).exp() + em) / (r * r))
    }
}

/// Near-pair integral for several wavenumbers sharing the singular part.
/// `pa` is the outer rule on panel a, `pb` the remainder rule on panel b.
pub fn near_pair(
    va: &[Vec3; 3],
    pa: &[(Vec3, f64)],
    vb: &[Vec3; 3],
    nb: Vec3,
    pb: &[(Vec3, f64)],
    ks: &[f64],
    same: bool,
) -> Vec<Local> {
    let mut out = vec![Local::default(); ks.len()];
    for &(x, wx) in pa {
        let (i0, ir, ig) = static_integrals(x, vb, nb);
        for (o, &k) in out.iter_mut().zip(ks) {
            let mut j0 = i0;
            let mut j1 = ir;
            let mut jg = ig;
            for &(y, wy) in pb {
                let dxy = sub(x, y);
                let r = norm(dxy);
                let (g, dg) = remainder(r, k);
                j0 += wy * g;
                axpy(&mut j1, -wy * g, dxy);
                if r > 0.0 {
                    axpy(&mut jg, wy * dg / r, dxy);
                }
            }
            o.s += wx * j0;
            for i in 0..3 {
                let a = sub(x, va[i]);
                for j in 0..3 {
                    let c = sub(x, vb[j]);
                    let inner = add(j1, scale(c, j0));
                    o.v[i][j] += wx * dot(a, inner);
                    if !same {
                        o.x[i][j] += wx * dot(a, cross(jg, c));
                    }
                }
            }
        }
    }
    out
}
