//! Free-space dyadic Green functions of a homogeneous medium at imaginary
//! frequency iξ, κ = ξ/c.
//!
//! Convention: g0 = e^{-κ√(εμ) r}/r solves (∇² - εμκ²) g0 = -4π δ, so the
//! point-source strength is [`SOURCE_STRENGTH`]. Arguments are the
//! separation dx = x - x'; derivatives with respect to x' are minus those
//! with respect to x. The contact term -4πμ⁻¹δ of the HH block is dropped
//! since boundary elements never sample coincident points.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::vec3::{norm, Mat3, Vec3};

pub const SOURCE_STRENGTH: f64 = 4.0 * std::f64::consts::PI;

/// e^{-kr}/r and its radial derivative coefficients:
/// ∂_i g = d1 x_i, ∂_i∂_j g = d1 δ_ij + d2 x_i x_j,
/// ∂_i∂_j∂_l g = d2 (δ_il x_j + δ_jl x_i + δ_ij x_l) + d3 x_i x_j x_l.
#[derive(Debug, Clone, Copy)]
pub struct Radial {
    pub g: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

#[inline]
pub fn radial(r: f64, k: f64) -> Radial {
    let kr = k * r;
    let e = (-kr).exp();
    let r2 = r * r;
    let g = e / r;
    let d1 = -(1.0 + kr) * e / (r2 * r);
    let d2 = (3.0 + 3.0 * kr + kr * kr) * e / (r2 * r2 * r);
    let d3 = -(15.0 + 15.0 * kr + 6.0 * kr * kr + kr * kr * kr) * e / (r2 * r2 * r2 * r);
    Radial { g, d1, d2, d3 }
}

pub fn scalar_g0(r: f64, eps: f64, mu: f64, kappa: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Singular(format!("g0 evaluated at r = {r}")));
    }
    Ok((-kappa * (eps * mu).sqrt() * r).exp() / r)
}

fn check(dx: Vec3, kappa: f64) -> Result<f64> {
    let r = norm(dx);
    if !(r > 0.0) {
        return Err(Error::Singular("dyadic Green function at coincident points".into()));
    }
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be > 0, got {kappa}")));
    }
    Ok(r)
}

fn hessian(dx: Vec3, rd: &Radial) -> Mat3 {
    let mut h = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            h[i][j] = rd.d2 * dx[i] * dx[j];
        }
        h[i][i] += rd.d1;
    }
    h
}

/// G^EE_ij = (1/ε) ∂_i∂_j g0 - μκ² δ_ij g0.
pub fn dyadic_ee(dx: Vec3, eps: f64, mu: f64, kappa: f64) -> Result<Mat3> {
    let r = check(dx, kappa)?;
    let rd = radial(r, kappa * (eps * mu).sqrt());
    Ok(dyadic_from(dx, &rd, eps, mu, kappa))
}

fn dyadic_from(dx: Vec3, rd: &Radial, a: f64, b: f64, kappa: f64) -> Mat3 {
    let mut m = hessian(dx, rd);
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] /= a;
        }
        m[i][i] -= b * kappa * kappa * rd.g;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEval {
    pub g_ee: Mat3,
    pub g_hh: Mat3,
    pub g_eh: Mat3,
    pub g_he: Mat3,
    /// grad_ee[l][i][j] = ∂/∂x_l G^EE_ij(x - x').
    pub grad_ee: [Mat3; 3],
}

pub fn dyadic_all(dx: Vec3, eps: f64, mu: f64, kappa: f64) -> Result<GreenEval> {
    let r = check(dx, kappa)?;
    let rd = radial(r, kappa * (eps * mu).sqrt());
    let g_ee = dyadic_from(dx, &rd, eps, mu, kappa);
    let g_hh = dyadic_from(dx, &rd, mu, eps, kappa);
    let grad = [rd.d1 * dx[0], rd.d1 * dx[1], rd.d1 * dx[2]];
    // G^HE_ij = -κ ε_ijk ∂_k g0, G^EH = -G^HE
    let mut g_he = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                s += levi(i, j, k) * grad[k];
            }
            g_he[i][j] = -kappa * s;
        }
    }
    let mut g_eh = g_he;
    for row in g_eh.iter_mut() {
        for v in row.iter_mut() {
            *v = -*v;
        }
    }
    let mut grad_ee = [[[0.0; 3]; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut t = rd.d3 * dx[i] * dx[j] * dx[l];
                if i == l {
                    t += rd.d2 * dx[j];
                }
                if j == l {
                    t += rd.d2 * dx[i];
                }
                if i == j {
                    t += rd.d2 * dx[l];
                }
                let mut v = t / eps;
                if i == j {
                    v -= mu * kappa * kappa * grad[l];
                }
                grad_ee[l][i][j] = v;
            }
        }
    }
    Ok(GreenEval { g_ee, g_hh, g_eh, g_he, grad_ee })
}

#[inline]
pub fn levi(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Fourier-space numerators of the vector-potential Green tensor and its
/// curls; the common denominator is εμκ² + q².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarGreenBlocks {
    /// 𝐺̃ = 1 + q qᵀ/(εμκ²)
    pub gt: Mat3,
    /// 𝐺̃′, purely imaginary and antisymmetric
    pub gt_curl: [[Complex64; 3]; 3],
    /// 𝐺̃″ = q² 1 - q qᵀ
    pub gt_curlcurl: Mat3,
    pub denominator: f64,
}

pub fn planar_blocks(kappa: f64, q: Vec3, eps: f64, mu: f64) -> Result<PlanarGreenBlocks> {
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be > 0, got {kappa}")));
    }
    let c = eps * mu * kappa * kappa;
    let q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    let mut gt = [[0.0; 3]; 3];
    let mut gcc = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            gt[i][j] = q[i] * q[j] / c;
            gcc[i][j] = -q[i] * q[j];
        }
        gt[i][i] += 1.0;
        gcc[i][i] += q2;
    }
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    let gt_curl = [
        [z, -i * q[2], i * q[1]],
        [i * q[2], z, -i * q[0]],
        [-i * q[1], i * q[0], z],
    ];
    Ok(PlanarGreenBlocks { gt, gt_curl, gt_curlcurl: gcc, denominator: c + q2 })
}
