//! Per-frequency log-determinant terms and Matsubara-summed free energies.

use faer::Mat;

use super::assembly::{Representation, System};
use super::mesh::BodyMesh;
use crate::error::{Error, Result};
use crate::linalg::{log_det_identity_plus, Lu};
use crate::materials::MediumAssignment;
use crate::matsubara::{weighted_sum, SumReport, ThermalSpec};
use crate::vec3::Vec3;

/// How log det(M̂ M̂_∞⁻¹) is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// log det M̂ − Σ_r log det M̂_r from separate factorizations.
    Ratio,
    /// log det(M̂_∞⁻¹ M̂) = Tr log(1 − 𝒦 ...) with the ratio matrix formed by
    /// block solves. More accurate when the interaction is weak.
    Kernel,
}

/// Small wavenumber used to reach ξ = 0 by extrapolation, in units of the
/// inverse body size.
pub const STATIC_KAPPA: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyResult {
    pub total: f64,
    pub per_frequency: Vec<(f64, f64)>,
    pub convergence: SumReport,
}

/// Surface-formula term log det(M̂ M̂_∞⁻¹) at imaginary frequency κ > 0.
pub fn surface_energy_term(bodies: &[BodyMesh], media: &MediumAssignment, kappa: f64) -> Result<f64> {
    energy_term(bodies, media, kappa, Representation::Surface, Route::Kernel)
}

/// Hamiltonian-formula term log det(N̂ N̂_∞⁻¹) at κ > 0.
pub fn hamiltonian_energy_term(bodies: &[BodyMesh], media: &MediumAssignment, kappa: f64) -> Result<f64> {
    energy_term(bodies, media, kappa, Representation::Hamiltonian, Route::Kernel)
}

pub fn energy_term(
    bodies: &[BodyMesh],
    media: &MediumAssignment,
    kappa: f64,
    repr: Representation,
    route: Route,
) -> Result<f64> {
    if bodies.len() < 2 {
        if !(kappa > 0.0) {
            return Err(Error::Domain(format!("kappa must be > 0, got {kappa}")));
        }
        return Ok(0.0);
    }
    let sys = System::assemble(bodies, media, kappa)?;
    term_from_system(&sys, repr, route)
}

pub(crate) fn term_from_system(sys: &System, repr: Representation, route: Route) -> Result<f64> {
    let full = sys.kernel(repr)?;
    let nb = sys.layout.edges.len();
    match route {
        Route::Ratio => {
            let (l, s) = Lu::new(full.mat.as_ref())?.log_det();
            let mut l_inf = 0.0;
            let mut s_inf = 1.0;
            for r in 0..nb {
                let (lr, sr) = Lu::new(sys.self_block(r, repr).as_ref())?.log_det();
                l_inf += lr;
                s_inf *= sr;
            }
            if s * s_inf < 0.0 {
                return Err(Error::Conditioning(format!(
                    "det(M) / det(M_inf) came out negative (log|ratio| = {:e})",
                    l - l_inf
                )));
            }
            Ok(l - l_inf)
        }
        Route::Kernel => {
            let w = ratio_matrix(sys, &full.mat, repr)?;
            let (l, s) = log_det_identity_plus(&w)?;
            if s < 0.0 {
                return Err(Error::Conditioning(format!(
                    "det(M_inf^-1 M) came out negative (log|det| = {l:e})"
                )));
            }
            Ok(l)
        }
    }
}

/// M̂_∞⁻¹ M̂ − 1, formed row block by row block; its diagonal blocks vanish.
fn ratio_matrix(sys: &System, full: &Mat<f64>, repr: Representation) -> Result<Mat<f64>> {
    let n = full.nrows();
    let mut w = Mat::zeros(n, n);
    for r in 0..sys.layout.edges.len() {
        let b = sys.layout.block(r);
        let lu = Lu::new(sys.self_block(r, repr).as_ref())?;
        let mut rows = full.as_ref().subrows(b.start, b.len()).to_owned();
        rows.as_mut().subcols_mut(b.start, b.len()).fill(0.0);
        let sol = lu.solve(rows.as_ref());
        w.as_mut().subrows_mut(b.start, b.len()).copy_from(sol.as_ref());
    }
    Ok(w)
}

/// Largest body size, used to set the static extrapolation wavenumber.
pub(crate) fn bodies_scale(bodies: &[BodyMesh]) -> f64 {
    bodies.iter().map(body_scale).fold(0.0, f64::max)
}

/// Radius of the sphere with the same surface area.
pub fn body_scale(body: &BodyMesh) -> f64 {
    (body.area() / (4.0 * std::f64::consts::PI)).sqrt()
}

/// Evaluates `term` at ξ, reaching ξ = 0 by 2T(κ₀/2) − T(κ₀).
pub fn at_frequency<F>(xi: f64, kappa0: f64, term: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if xi > 0.0 {
        term(xi)
    } else if xi == 0.0 {
        Ok(2.0 * term(0.5 * kappa0)? - term(kappa0)?)
    } else {
        Err(Error::Domain(format!("frequency must be ≥ 0, got {xi}")))
    }
}

/// Closest centroid distance over all body pairs.
pub(crate) fn min_gap(bodies: &[BodyMesh]) -> f64 {
    let mut d = f64::INFINITY;
    for r in 0..bodies.len() {
        for s in r + 1..bodies.len() {
            d = d.min(bodies[r].min_distance(&bodies[s]));
        }
    }
    d
}

/// Free energy k_B T Σ′ log det(M̂ M̂_∞⁻¹) (or the T = 0 integral).
pub fn free_energy(
    bodies: &[BodyMesh],
    media: &MediumAssignment,
    thermal: &ThermalSpec,
    repr: Representation,
) -> Result<EnergyResult> {
    let kappa0 = STATIC_KAPPA / bodies_scale(bodies).max(f64::MIN_POSITIVE);
    let mut spec = *thermal;
    if bodies.len() >= 2 {
        spec.xi_scale = 1.0 / min_gap(bodies);
    }
    let report = weighted_sum(
        |xi| at_frequency(xi, kappa0, |k| energy_term(bodies, media, k, repr, Route::Kernel)),
        &spec,
    )?;
    Ok(EnergyResult {
        total: report.value,
        per_frequency: report.terms.iter().map(|t| (t.xi, t.value)).collect(),
        convergence: report,
    })
}

/// Part of the two-body term Tr log(1 − A), A = M̂₁⁻¹Ĝ₁₂M̂₂⁻¹Ĝ₂₁, carried by
/// the edges of body 0 whose midpoints satisfy `select`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionEnergy {
    pub value: f64,
    pub area: f64,
    pub edges: usize,
}

impl RegionEnergy {
    pub fn per_area(&self) -> f64 {
        self.value / self.area
    }
}

pub fn region_energy_term<F>(bodies: &[BodyMesh], media: &MediumAssignment, kappa: f64, select: F) -> Result<RegionEnergy>
where
    F: Fn(Vec3) -> bool,
{
    if bodies.len() != 2 {
        return Err(Error::Domain("region energy needs exactly two bodies".into()));
    }
    let sys = System::assemble(bodies, media, kappa)?;
    let full = sys.kernel(Representation::Surface)?;
    let b0 = sys.layout.block(0);
    let b1 = sys.layout.block(1);
    let m1 = Lu::new(sys.self_block(0, Representation::Surface).as_ref())?;
    let m2 = Lu::new(sys.self_block(1, Representation::Surface).as_ref())?;
    let g12 = full.mat.as_ref().submatrix(b0.start, b1.start, b0.len(), b1.len());
    let g21 = full.mat.as_ref().submatrix(b1.start, b0.start, b1.len(), b0.len());
    let p = m1.solve(g12); // M1⁻¹ G12
    let q = m2.solve(g21); // M2⁻¹ G21

    let ne = bodies[0].n_edges();
    let mut cols = Vec::new();
    let mut area = 0.0;
    for e in 0..ne {
        if select(bodies[0].edge_midpoint(e)) {
            cols.push(e);
            cols.push(ne + e);
            area += bodies[0].edge_area(e);
        }
    }
    if cols.is_empty() {
        return Err(Error::Domain("region selects no edges".into()));
    }
    // diag of log(1 − A) = −Σ_k diag(A^k)/k on the selected columns
    let mut b = Mat::<f64>::zeros(b0.len(), cols.len());
    for (c, &i) in cols.iter().enumerate() {
        b[(i, c)] = 1.0;
    }
    let mut value = 0.0;
    for k in 1..=200 {
        let qb = &q * &b;
        b = &p * &qb;
        let d: f64 = cols.iter().enumerate().map(|(c, &i)| b[(i, c)]).sum::<f64>() / k as f64;
        value -= d;
        if d.abs() < 1e-14 * value.abs().max(f64::MIN_POSITIVE) {
            return Ok(RegionEnergy { value, area, edges: cols.len() / 2 });
        }
    }
    Err(Error::Accuracy("log(1 − A) series did not converge; spectral radius too close to 1".into()))
}
