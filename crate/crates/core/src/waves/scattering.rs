//! Two-body scattering formula log det(1 − R) per frequency.
//!
//! Body 1 scatters Σ b Φ^{out} about X₁; re-expanded about X₂ this is the
//! incident field a₂ = U^{(12)ᵀ} b, and so on around the loop, giving the
//! round trip R = U^{(21)ᵀ} T₂ U^{(12)ᵀ} T₁. Translation along ẑ keeps m,
//! so R splits into m blocks when both T-matrices do.

use faer::{c64, Mat};

use super::tmatrix::{tmatrix_from_surface, TMatrix};
use super::translation::{translation_matrix, translation_matrix_21};
use super::{block_modes, mode_position, modes, PartialWaveIndex};
use crate::bem::energy::{at_frequency, body_scale, STATIC_KAPPA};
use crate::bem::BodyMesh;
use crate::error::{Error, Result};
use crate::linalg::log_det_identity_plus_complex;
use crate::materials::MediumAssignment;
use crate::matsubara::{weighted_sum, SumReport, ThermalSpec};
use crate::vec3::sub;

/// Entries coupling different m below this (relative) count as zero.
const M_LEAK_TOL: f64 = 1e-10;
/// Relative imaginary part tolerated in a log det.
const IMAG_TOL: f64 = 1e-10;

fn check(t1: &TMatrix, t2: &TMatrix, d: f64, kappa: f64, l_max: usize) -> Result<()> {
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be > 0, got {kappa}")));
    }
    for (name, t) in [("T1", t1), ("T2", t2)] {
        if (t.kappa - kappa).abs() > 1e-12 * kappa {
            return Err(Error::Domain(format!("{name} was computed at κ = {}, not {kappa}", t.kappa)));
        }
        if t.l_max < l_max {
            return Err(Error::Domain(format!("{name} only reaches l = {}, need {l_max}", t.l_max)));
        }
    }
    if l_max == 0 {
        return Err(Error::Domain("l_max must be ≥ 1".into()));
    }
    if !(d > t1.radius + t2.radius) {
        return Err(Error::Geometry(format!(
            "enclosing spheres overlap: d = {d}, radii {} and {}",
            t1.radius, t2.radius
        )));
    }
    Ok(())
}

/// Real log det(1 − R), accurate relative to small R.
fn real_log_det(r: Mat<c64>) -> Result<f64> {
    let ld = log_det_identity_plus_complex(&-r)?;
    if ld.im.abs() > IMAG_TOL.max(IMAG_TOL * ld.re.abs()) {
        return Err(Error::Accuracy(format!(
            "det(1 − R) is not real and positive: log det = {} + {}i",
            ld.re, ld.im
        )));
    }
    Ok(ld.re)
}

fn round_trip(t1: &Mat<c64>, t2: &Mat<c64>, u12: &Mat<c64>, u21: &Mat<c64>) -> Mat<c64> {
    let a = u12.transpose() * t1;
    let b = t2 * &a;
    u21.transpose() * &b
}

/// Σ_m log det(1 − R_m) with body 2 at X₁ + d ẑ. Falls back to
/// [`scattering_energy_full`] when a T-matrix couples different m.
pub fn scattering_energy(t1: &TMatrix, t2: &TMatrix, d: f64, kappa: f64, l_max: usize) -> Result<f64> {
    check(t1, t2, d, kappa, l_max)?;
    let (t1, t2) = (t1.truncated(l_max), t2.truncated(l_max));
    if t1.m_leakage() > M_LEAK_TOL || t2.m_leakage() > M_LEAK_TOL {
        return scattering_energy_full(&t1, &t2, d, kappa, l_max);
    }
    let mut total = 0.0;
    for m in -(l_max as i64)..=l_max as i64 {
        let u12 = translation_matrix(d, kappa, l_max, m)?.u;
        let u21 = translation_matrix_21(d, kappa, l_max, m)?.u;
        let r = round_trip(&t1.m_block(m), &t2.m_block(m), &u12, &u21);
        total += real_log_det(r)?;
    }
    Ok(total)
}

/// Same quantity from the full matrices over all (p, l, m).
pub fn scattering_energy_full(t1: &TMatrix, t2: &TMatrix, d: f64, kappa: f64, l_max: usize) -> Result<f64> {
    check(t1, t2, d, kappa, l_max)?;
    let (t1, t2) = (t1.truncated(l_max), t2.truncated(l_max));
    let n = modes(l_max).len();
    let mut u12 = Mat::<c64>::zeros(n, n);
    let mut u21 = Mat::<c64>::zeros(n, n);
    for m in -(l_max as i64)..=l_max as i64 {
        let pos: Vec<usize> = block_modes(l_max, m)
            .iter()
            .map(|&(p, l)| mode_position(&PartialWaveIndex { p, l, m }))
            .collect();
        let a = translation_matrix(d, kappa, l_max, m)?.u;
        let b = translation_matrix_21(d, kappa, l_max, m)?.u;
        for (i, &pi) in pos.iter().enumerate() {
            for (j, &pj) in pos.iter().enumerate() {
                u12[(pi, pj)] = a[(i, j)];
                u21[(pi, pj)] = b[(i, j)];
            }
        }
    }
    real_log_det(round_trip(&t1.data, &t2.data, &u12, &u21))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveEnergy {
    pub value: f64,
    pub l_max: usize,
    /// |E(l_max) − E(l_max − 1)| / |E(l_max)|.
    pub last_multipole: f64,
    pub converged: bool,
}

/// Scattering energy of two meshed bodies whose centres differ by d ẑ,
/// d > 0. Starts at `l_start` and raises l_max by 2 until the last
/// multipole changes the result by at most `tol` (relative) or `l_cap`
/// is reached.
pub fn scattering_energy_adaptive(
    bodies: [&BodyMesh; 2],
    media: &MediumAssignment,
    kappa: f64,
    l_start: usize,
    l_cap: usize,
    tol: f64,
) -> Result<AdaptiveEnergy> {
    let sep = sub(bodies[1].center, bodies[0].center);
    let d = sep[2];
    if !(d > 0.0) || sep[0].abs() > 1e-12 * d || sep[1].abs() > 1e-12 * d {
        return Err(Error::Geometry(format!(
            "body centres must be separated along +z, got {sep:?}"
        )));
    }
    if l_start < 2 || l_cap < l_start {
        return Err(Error::Domain(format!("need 2 ≤ l_start ≤ l_cap, got {l_start}, {l_cap}")));
    }
    let mut l = l_start;
    loop {
        let t1 = tmatrix_from_surface(bodies[0], media, kappa, l)?;
        let t2 = tmatrix_from_surface(bodies[1], media, kappa, l)?;
        let e = scattering_energy(&t1, &t2, d, kappa, l)?;
        let prev = scattering_energy(&t1, &t2, d, kappa, l - 1)?;
        let last = if e != 0.0 { ((e - prev) / e).abs() } else { 0.0 };
        let converged = last <= tol;
        if converged || l >= l_cap {
            return Ok(AdaptiveEnergy { value: e, l_max: l, last_multipole: last, converged });
        }
        l = (l + 2).min(l_cap);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringFreeEnergy {
    pub total: f64,
    pub report: SumReport,
    /// Largest l_max any frequency needed.
    pub l_max: usize,
    /// False if some frequency hit `l_cap` before meeting `tol`.
    pub multipoles_converged: bool,
}

/// Frequency sum of [`scattering_energy_adaptive`]; ξ = 0 is reached by
/// the same extrapolation the boundary-element energy uses.
pub fn scattering_free_energy(
    bodies: [&BodyMesh; 2],
    media: &MediumAssignment,
    thermal: &ThermalSpec,
    l_start: usize,
    l_cap: usize,
    tol: f64,
) -> Result<ScatteringFreeEnergy> {
    let kappa0 = STATIC_KAPPA / body_scale(bodies[0]).max(body_scale(bodies[1]));
    let mut spec = *thermal;
    spec.xi_scale = 1.0 / bodies[0].min_distance(bodies[1]);
    let seen = std::sync::Mutex::new((0usize, true));
    let term = |k: f64| -> Result<f64> {
        let a = scattering_energy_adaptive(bodies, media, k, l_start, l_cap, tol)?;
        let mut g = seen.lock().expect("lock");
        g.0 = g.0.max(a.l_max);
        g.1 &= a.converged;
        Ok(a.value)
    };
    let report = weighted_sum(|xi| at_frequency(xi, kappa0, term), &spec)?;
    let (l_max, multipoles_converged) = *seen.lock().expect("lock");
    Ok(ScatteringFreeEnergy { total: report.value, report, l_max, multipoles_converged })
}

