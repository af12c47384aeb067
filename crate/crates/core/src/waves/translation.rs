//! Translation matrices along ẑ by projection onto regular waves.
//!
//! For X₂ − X₁ = d ẑ,
//! Φ^{out}_{p'l'm}(x − X₁) = Σ_{pl} U^{(12)}_{p'l';pl} Φ^{reg}_{plm}(x − X₂)
//! and likewise U^{(21)} with the roles of the centres exchanged. The
//! outgoing wave is sampled on a sphere of radius d/2 about the expansion
//! centre. The field carries e^{imφ}, so the φ integral is exact at φ = 0
//! and a Gauss–Legendre rule in cos θ does the rest. M coefficients come
//! from the tangential field; N coefficients from the radial field, with
//! the tangential N projection kept as an independent residual.

use std::f64::consts::PI;

use faer::{c64, Mat};

use super::vsh::{CVec3, PointWaves};
use super::{block_modes, Polarization, WaveKind};
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::vec3::Vec3;

/// Residual above which the projection is rejected.
pub const PROJECTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct TranslationMatrix {
    pub m: i64,
    pub l_max: usize,
    pub d: f64,
    pub kappa: f64,
    /// Row and column order, see [`block_modes`].
    pub modes: Vec<(Polarization, usize)>,
    /// u[(row, col)] = U_{p'l';pl}: row is the outgoing wave, column the
    /// regular wave it expands into.
    pub u: Mat<c64>,
    /// Mismatch of the two N projections relative to the sampled field.
    pub residual: f64,
}

fn dotu(a: &CVec3, b: &CVec3) -> c64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

/// Projection with the outgoing waves centred at `shift` relative to the
/// expansion centre.
fn project(shift: f64, kappa: f64, l_max: usize, m: i64) -> Result<(Mat<c64>, f64)> {
    let modes = block_modes(l_max, m);
    let n = modes.len();
    let rho = 0.5 * shift.abs();
    let nodes = 2 * (l_max + 1) + 40;
    let (cs, ws) = gauss_legendre(nodes);
    // ⟨reg, out⟩ sums per (row, col): M tangential, N radial, N tangential
    let mut pm = Mat::<c64>::zeros(n, n);
    let mut pr = Mat::<c64>::zeros(n, n);
    let mut pt = Mat::<c64>::zeros(n, n);
    let mut field_norm = vec![0.0; n];
    for (&c, &w) in cs.iter().zip(&ws) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        let y: Vec3 = [rho * s, 0.0, rho * c];
        let reg = PointWaves::new(y, kappa, WaveKind::Regular, l_max)?;
        let out = PointWaves::new([y[0], y[1], y[2] - shift], kappa, WaveKind::Outgoing, l_max)?;
        let rhat = reg.frame().rhat;
        let wt = 2.0 * PI * w;
        let fields: Vec<CVec3> = modes.iter().map(|&(p, l)| out.wave(p, l, m)).collect();
        for (i, f) in fields.iter().enumerate() {
            field_norm[i] += wt * f.iter().map(|v| v.norm_sqr()).sum::<f64>();
            let fr = f[0] * rhat[0] + f[1] * rhat[1] + f[2] * rhat[2];
            let ft: CVec3 = std::array::from_fn(|k| f[k] - fr * rhat[k]);
            for (j, &(p, l)) in modes.iter().enumerate() {
                let g = reg.wave(p, l, m);
                match p {
                    Polarization::M => pm[(i, j)] += wt * dotu(&g, f),
                    Polarization::N => {
                        let gr = g[0] * rhat[0] + g[1] * rhat[1] + g[2] * rhat[2];
                        let gt: CVec3 = std::array::from_fn(|k| g[k] - gr * rhat[k]);
                        pr[(i, j)] += wt * gr.conj() * fr;
                        pt[(i, j)] += wt * dotu(&gt, &ft);
                    }
                }
            }
        }
    }
    // norms of the regular waves on the sphere
    let z = kappa * rho;
    let prof = super::bessel::regular_profiles(l_max, z)?;
    let mut u = Mat::<c64>::zeros(n, n);
    let mut residual = 0.0f64;
    for (j, &(p, l)) in modes.iter().enumerate() {
        let ll = (l * (l + 1)) as f64;
        let r = prof[l];
        for i in 0..n {
            match p {
                Polarization::M => u[(i, j)] = pm[(i, j)] / (r.f * r.f),
                Polarization::N => {
                    let nr = ll * r.f_over_z * r.f_over_z;
                    let nt = r.df_over_z * r.df_over_z;
                    let a = pr[(i, j)] / nr;
                    let b = pt[(i, j)] / nt;
                    u[(i, j)] = a;
                    let scale = field_norm[i].sqrt();
                    if scale > 0.0 {
                        residual = residual.max((a - b).norm() * (nr + nt).sqrt() / scale);
                    }
                }
            }
        }
    }
    let finite = (0..n).all(|j| (0..n).all(|i| u[(i, j)].re.is_finite() && u[(i, j)].im.is_finite()));
    if !finite {
        return Err(Error::Accuracy(format!(
            "translation matrix overflowed (κd = {}, l_max = {l_max})",
            kappa * shift.abs()
        )));
    }
    Ok((u, residual))
}

fn build(d: f64, kappa: f64, l_max: usize, m: i64, shift: f64) -> Result<TranslationMatrix> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("translation distance must be > 0, got {d}")));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("kappa must be > 0, got {kappa}")));
    }
    if l_max == 0 || m.unsigned_abs() as usize > l_max {
        return Err(Error::Domain(format!("no partial waves with l ≤ {l_max} and m = {m}")));
    }
    let (u, residual) = project(shift, kappa, l_max, m)?;
    if residual > PROJECTION_TOL {
        return Err(Error::Accuracy(format!(
            "translation projection residual {residual:e} at m = {m}; increase l_max"
        )));
    }
    Ok(TranslationMatrix { m, l_max, d, kappa, modes: block_modes(l_max, m), u, residual })
}

/// U^{(12)}(d) at fixed m: outgoing waves about X₁ in regular waves about
/// X₂ = X₁ + d ẑ.
pub fn translation_matrix(d: f64, kappa: f64, l_max: usize, m: i64) -> Result<TranslationMatrix> {
    build(d, kappa, l_max, m, -d)
}

/// U^{(21)}(d): outgoing waves about X₂ in regular waves about X₁.
pub fn translation_matrix_21(d: f64, kappa: f64, l_max: usize, m: i64) -> Result<TranslationMatrix> {
    build(d, kappa, l_max, m, d)
}
