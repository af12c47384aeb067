//! T-matrices as matrix elements of 𝒦̂_r = −M̂_r⁻¹ between regular waves.

use faer::{c64, Mat};
use rayon::prelude::*;

use super::vsh::PointWaves;
use super::{block_modes, lambda, mode_position, modes, FieldType, PartialWaveIndex, WaveKind};
use crate::bem::assembly::{media_at, self_kernel_prepared, Prepared};
use crate::bem::BodyMesh;
use crate::error::{Error, Result};
use crate::linalg::{check_finite, solve_consuming};
use crate::materials::MediumAssignment;
use crate::vec3::{norm, sub, Vec3};

/// Scattering matrix of one body about its center: an incident field
/// Σ a_{plm} Φ^{reg}_{plm} scatters into Σ (T a)_{plm} Φ^{out}_{plm}.
#[derive(Debug, Clone)]
pub struct TMatrix {
    pub modes: Vec<PartialWaveIndex>,
    pub data: Mat<c64>,
    pub l_max: usize,
    pub kappa: f64,
    pub body: usize,
    pub center: Vec3,
    /// Radius of the smallest sphere about `center` holding the body.
    pub radius: f64,
}

impl TMatrix {
    pub fn get(&self, a: &PartialWaveIndex, b: &PartialWaveIndex) -> c64 {
        if a.l > self.l_max || b.l > self.l_max {
            return c64::new(0.0, 0.0);
        }
        self.data[(mode_position(a), mode_position(b))]
    }

    /// Same T-matrix restricted to l ≤ l_max.
    pub fn truncated(&self, l_max: usize) -> TMatrix {
        let l = l_max.min(self.l_max);
        let n = modes(l).len();
        TMatrix {
            modes: modes(l),
            data: self.data.as_ref().submatrix(0, 0, n, n).to_owned(),
            l_max: l,
            ..self.clone()
        }
    }

    /// Block of fixed m over [`block_modes`].
    pub fn m_block(&self, m: i64) -> Mat<c64> {
        let bm = block_modes(self.l_max, m);
        let pos: Vec<usize> = bm
            .iter()
            .map(|&(p, l)| mode_position(&PartialWaveIndex { p, l, m }))
            .collect();
        Mat::from_fn(pos.len(), pos.len(), |i, j| self.data[(pos[i], pos[j])])
    }

    /// Largest entry coupling different m, relative to the largest entry.
    pub fn m_leakage(&self) -> f64 {
        let mut off = 0.0f64;
        let mut all = 0.0f64;
        for (i, a) in self.modes.iter().enumerate() {
            for (j, b) in self.modes.iter().enumerate() {
                let v = self.data[(i, j)].norm();
                all = all.max(v);
                if a.m != b.m {
                    off = off.max(v);
                }
            }
        }
        if all > 0.0 {
            off / all
        } else {
            0.0
        }
    }
}

/// Galerkin projections ∫ f_n · Φ_j (no conjugation) of the E- and H-type
/// regular waves about `center` onto the edge functions.
fn projections(body: &BodyMesh, prep: &Prepared, center: Vec3, kappa: f64, l_max: usize) -> Result<(Mat<c64>, Mat<c64>)> {
    let all = modes(l_max);
    let nm = all.len();
    let local: Vec<Result<Vec<[c64; 2]>>> = (0..body.n_panels())
        .into_par_iter()
        .map(|t| {
            let mut acc = vec![[c64::new(0.0, 0.0); 2]; 3 * nm];
            for &(x, w) in &prep.p7[t] {
                let pw = PointWaves::new(sub(x, center), kappa, WaveKind::Regular, l_max)?;
                let shape: [Vec3; 3] = std::array::from_fn(|i| {
                    let d = sub(x, prep.verts[t][i]);
                    let c = prep.basis[t][i].1 * w;
                    [c * d[0], c * d[1], c * d[2]]
                });
                for (j, idx) in all.iter().enumerate() {
                    let e = pw.field_wave(FieldType::E, idx.p, idx.l, idx.m);
                    let h = pw.field_wave(FieldType::H, idx.p, idx.l, idx.m);
                    for (i, f) in shape.iter().enumerate() {
                        let a = &mut acc[i * nm + j];
                        for c in 0..3 {
                            a[0] += e[c] * f[c];
                            a[1] += h[c] * f[c];
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let ne = body.n_edges();
    let mut pe = Mat::<c64>::zeros(ne, nm);
    let mut ph = Mat::<c64>::zeros(ne, nm);
    for (t, acc) in local.into_iter().enumerate() {
        let acc = acc?;
        for i in 0..3 {
            let e = prep.basis[t][i].0;
            for j in 0..nm {
                pe[(e, j)] += acc[i * nm + j][0];
                ph[(e, j)] += acc[i * nm + j][1];
            }
        }
    }
    Ok((pe, ph))
}

/// 𝒯_{plm,p'l'm'} = λ (−1)^m Σ_{μν} (−1)^{s(μ)} ⟨Φ^{μ|reg}_{pl,−m}| 𝒦̂ |Φ^{ν|reg}_{p'l'm'}⟩
/// with 𝒦̂ = −M̂_r⁻¹ in the edge basis and s(E) = 0, s(H) = 1. The waves
/// are centred at `body.center`; the outer medium must be vacuum.
pub fn tmatrix_from_surface(body: &BodyMesh, media: &MediumAssignment, kappa: f64, l_max: usize) -> Result<TMatrix> {
    if l_max == 0 {
        return Err(Error::Domain("l_max must be ≥ 1".into()));
    }
    let bodies = std::slice::from_ref(body);
    let (outer, _) = media_at(media, bodies, kappa)?;
    if outer.eps != 1.0 || outer.mu != 1.0 {
        return Err(Error::Domain(format!(
            "partial waves need a vacuum outer medium, got ε = {}, μ = {}",
            outer.eps, outer.mu
        )));
    }
    let (_, inner) = media_at(media, bodies, kappa)?;
    let prep = Prepared::new(body);
    let m = self_kernel_prepared(&prep, outer, inner[0], kappa);
    check_finite(m.as_ref())?;
    let (pe, ph) = projections(body, &prep, body.center, kappa, l_max)?;
    let ne = body.n_edges();
    let all = modes(l_max);
    let nm = all.len();

    // solve M X = [PE; PH] for real and imaginary parts at once
    let rhs = Mat::<f64>::from_fn(2 * ne, 2 * nm, |i, j| {
        let v = if i < ne { pe[(i, j % nm)] } else { ph[(i - ne, j % nm)] };
        if j < nm {
            v.re
        } else {
            v.im
        }
    });
    let x = solve_consuming(m, rhs)?;
    let lam = lambda(kappa);
    let mut data = Mat::<c64>::zeros(nm, nm);
    for (a, idx) in all.iter().enumerate() {
        let af = mode_position(&idx.flipped());
        let sm = if idx.m % 2 == 0 { 1.0 } else { -1.0 };
        let c = -lam * sm;
        for b in 0..nm {
            let mut s = c64::new(0.0, 0.0);
            for k in 0..ne {
                let xe = c64::new(x[(k, b)], x[(k, nm + b)]);
                let xh = c64::new(x[(ne + k, b)], x[(ne + k, nm + b)]);
                s += pe[(k, af)] * xe - ph[(k, af)] * xh;
            }
            data[(a, b)] = c * s;
        }
    }
    let radius = body.vertices.iter().map(|&v| norm(sub(v, body.center))).fold(0.0, f64::max);
    Ok(TMatrix { modes: all, data, l_max, kappa, body: body.material_index, center: body.center, radius })
}
