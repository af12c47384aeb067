//! Two half-spaces separated by a gap H: reflection factors, the 4×4
//! surface-field matrix, the 8×8 Hamiltonian matrix and the free energy
//! per unit area.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::materials::{response, MaterialModel, Response};
use crate::matsubara::{weighted_sum, SumReport, ThermalSpec};
use crate::quad::gauss_legendre;

#[derive(Debug, Clone, PartialEq)]
pub struct SlabConfig {
    pub gap: f64,
    /// gap medium
    pub medium0: MaterialModel,
    /// z ≤ 0
    pub medium1: MaterialModel,
    /// z ≥ H
    pub medium2: MaterialModel,
    pub thermal: ThermalSpec,
}

impl SlabConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap > 0.0 && self.gap.is_finite()) {
            return Err(Error::Domain(format!("gap must be > 0, got {}", self.gap)));
        }
        self.medium0.validate()?;
        self.medium1.validate()?;
        self.medium2.validate()?;
        self.thermal.validate()
    }

    pub fn responses(&self, xi: f64) -> Result<[Response; 3]> {
        Ok([
            response(&self.medium0, xi)?,
            response(&self.medium1, xi)?,
            response(&self.medium2, xi)?,
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarMomenta {
    pub k_par: f64,
    pub kappa: f64,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl PlanarMomenta {
    /// p_r = sqrt(ε_r μ_r κ² + k∥²). Perfect conductors (ε = ∞, only at
    /// κ = 0) get p_r = k∥.
    pub fn new(k_par: f64, kappa: f64, media: &[Response; 3]) -> Self {
        let p = |r: &Response| {
            if kappa == 0.0 || r.eps.is_infinite() {
                k_par
            } else {
                (r.eps * r.mu * kappa * kappa + k_par * k_par).sqrt()
            }
        };
        PlanarMomenta {
            k_par,
            kappa,
            p0: p(&media[0]),
            p1: p(&media[1]),
            p2: p(&media[2]),
        }
    }
}

/// (rE, rM) for the interface between the gap medium and medium r.
pub fn reflection_factors(p0: f64, pr: f64, m0: Response, mr: Response) -> (f64, f64) {
    let re = if mr.eps.is_infinite() {
        -1.0
    } else {
        (m0.eps * pr - mr.eps * p0) / (m0.eps * pr + mr.eps * p0)
    };
    let rm = (m0.mu * pr - mr.mu * p0) / (m0.mu * pr + mr.mu * p0);
    (re, rm)
}

/// κ → 0 limits of the reflection factors.
pub fn static_reflection(m0: Response, mr: Response) -> (f64, f64) {
    let re = if mr.eps.is_infinite() {
        -1.0
    } else {
        (m0.eps - mr.eps) / (m0.eps + mr.eps)
    };
    (re, (m0.mu - mr.mu) / (m0.mu + mr.mu))
}

/// M M∞⁻¹ in the (M₁, N₁, M₂, N₂) plane-wave basis.
pub fn lagrange_matrix(m: &PlanarMomenta, media: &[Response; 3], gap: f64) -> [[f64; 4]; 4] {
    let [r0, r1, r2] = *media;
    let (p0, p1, p2) = (m.p0, m.p1, m.p2);
    let x = (-p0 * gap).exp();
    let a_m = r2.mu / r1.mu * (r0.mu * p1 - r1.mu * p0) / (r0.mu * p2 + r2.mu * p0) * x;
    let b_m = r1.mu / r2.mu * (r0.mu * p2 - r2.mu * p0) / (r0.mu * p1 + r1.mu * p0) * x;
    let (a_e, b_e) = if r1.eps.is_infinite() || r2.eps.is_infinite() {
        // the printed entries are ∞/∞ here; use the balanced pair with the
        // same product rE1 rE2 e^{-2p0H}
        let (re1, _) = reflection_factors(p0, p1, r0, r1);
        let (re2, _) = reflection_factors(p0, p2, r0, r2);
        (re1 * x, re2 * x)
    } else {
        (
            (r0.eps * p1 - r1.eps * p0) / (r0.eps * p2 + r2.eps * p0) * x,
            (r0.eps * p2 - r2.eps * p0) / (r0.eps * p1 + r1.eps * p0) * x,
        )
    };
    [
        [1.0, 0.0, a_m, 0.0],
        [0.0, 1.0, 0.0, a_e],
        [b_m, 0.0, 1.0, 0.0],
        [0.0, b_e, 0.0, 1.0],
    ]
}

/// (rE1 rE2 e^{-2p0H}, rM1 rM2 e^{-2p0H}).
fn round_trips(m: &PlanarMomenta, media: &[Response; 3], gap: f64) -> (f64, f64) {
    let (re1, rm1, re2, rm2) = if m.kappa == 0.0 {
        let (a, b) = static_reflection(media[0], media[1]);
        let (c, d) = static_reflection(media[0], media[2]);
        (a, b, c, d)
    } else {
        let (a, b) = reflection_factors(m.p0, m.p1, media[0], media[1]);
        let (c, d) = reflection_factors(m.p0, m.p2, media[0], media[2]);
        (a, b, c, d)
    };
    let x = (-2.0 * m.p0 * gap).exp();
    (re1 * re2 * x, rm1 * rm2 * x)
}

/// (1 - rE1 rE2 e^{-2p0H})(1 - rM1 rM2 e^{-2p0H}).
pub fn lifshitz_det(m: &PlanarMomenta, media: &[Response; 3], gap: f64) -> f64 {
    let (a, b) = round_trips(m, media, gap);
    (1.0 - a) * (1.0 - b)
}

/// ln of [`lifshitz_det`], accurate when the round trips are tiny.
pub fn lifshitz_log_det(m: &PlanarMomenta, media: &[Response; 3], gap: f64) -> f64 {
    let (a, b) = round_trips(m, media, gap);
    (-a).ln_1p() + (-b).ln_1p()
}

fn l_block(qx: f64, qy: f64, kappa: f64, r: Response, upper: bool) -> [[f64; 4]; 4] {
    let p = (r.eps * r.mu * kappa * kappa + qx * qx + qy * qy).sqrt();
    let c = r.eps * r.mu * kappa * kappa;
    let s = if upper { 1.0 } else { -1.0 };
    let f = 1.0 / (r.mu * 2.0 * p);
    let b = [
        [qy * qy - p * p, -qx * qy, 0.0, -s * p],
        [-qx * qy, qx * qx - p * p, s * p, 0.0],
        [0.0, -s * p, 1.0 + qx * qx / c, qx * qy / c],
        [s * p, 0.0, qx * qy / c, 1.0 + qy * qy / c],
    ];
    b.map(|row| row.map(|v| f * v))
}

#[allow(clippy::too_many_arguments)]
fn m_block(qx: f64, qy: f64, kappa: f64, r0: Response, mu_r: f64, mu_s: f64, upper: bool, diag: bool, gap: f64) -> [[f64; 4]; 4] {
    let p = (r0.eps * r0.mu * kappa * kappa + qx * qx + qy * qy).sqrt();
    let c = r0.eps * r0.mu * kappa * kappa;
    let m0 = r0.mu;
    // diagonal blocks carry ±, off-diagonal ∓ on the curl entries
    let s = if upper == diag { 1.0 } else { -1.0 };
    let f = m0 / (2.0 * p) * if diag { 1.0 } else { (-p * gap).exp() };
    let b = [
        [(qy * qy - p * p) / (m0 * m0), -qx * qy / (m0 * m0), 0.0, s * p / (m0 * mu_s)],
        [-qx * qy / (m0 * m0), (qx * qx - p * p) / (m0 * m0), -s * p / (m0 * mu_s), 0.0],
        [0.0, s * p / (m0 * mu_r), (1.0 + qx * qx / c) / (mu_r * mu_s), qx * qy / c / (mu_r * mu_s)],
        [-s * p / (m0 * mu_r), 0.0, qx * qy / c / (mu_r * mu_s), (1.0 + qy * qy / c) / (mu_r * mu_s)],
    ];
    b.map(|row| row.map(|v| f * v))
}

/// N(q∥) in the ordering (K₁, K′₁, K₂, K′₂), each with (x, y) components.
pub fn hamiltonian_blocks(qx: f64, qy: f64, kappa: f64, media: &[Response; 3], gap: f64) -> Result<[[f64; 8]; 8]> {
    if !(kappa > 0.0) {
        return Err(Error::Domain("the Hamiltonian planar kernel needs kappa > 0".into()));
    }
    let [r0, r1, r2] = *media;
    let mut n = [[0.0; 8]; 8];
    let put = |n: &mut [[f64; 8]; 8], b: [[f64; 4]; 4], ro: usize, co: usize| {
        for i in 0..4 {
            for j in 0..4 {
                n[ro + i][co + j] += b[i][j];
            }
        }
    };
    put(&mut n, l_block(qx, qy, kappa, r1, true), 0, 0);
    put(&mut n, m_block(qx, qy, kappa, r0, r1.mu, r1.mu, true, true, gap), 0, 0);
    put(&mut n, l_block(qx, qy, kappa, r2, false), 4, 4);
    put(&mut n, m_block(qx, qy, kappa, r0, r2.mu, r2.mu, false, true, gap), 4, 4);
    put(&mut n, m_block(qx, qy, kappa, r0, r1.mu, r2.mu, true, false, gap), 0, 4);
    put(&mut n, m_block(qx, qy, kappa, r0, r2.mu, r1.mu, false, false, gap), 4, 0);
    Ok(n)
}

/// N N∞⁻¹ with q∥ along x̂.
pub fn hamiltonian_matrix(m: &PlanarMomenta, media: &[Response; 3], gap: f64) -> Result<[[f64; 8]; 8]> {
    hamiltonian_matrix_q(m.k_par, 0.0, m.kappa, media, gap)
}

pub fn hamiltonian_matrix_q(qx: f64, qy: f64, kappa: f64, media: &[Response; 3], gap: f64) -> Result<[[f64; 8]; 8]> {
    let n = hamiltonian_blocks(qx, qy, kappa, media, gap)?;
    let mut inf = n;
    for i in 0..8 {
        for j in 0..8 {
            if (i < 4) != (j < 4) {
                inf[i][j] = 0.0;
            }
        }
    }
    let a = faer::Mat::<f64>::from_fn(8, 8, |i, j| n[i][j]);
    let b = faer::Mat::<f64>::from_fn(8, 8, |i, j| inf[i][j]);
    // N N∞⁻¹ = (N∞⁻ᵀ Nᵀ)ᵀ
    let lu = crate::linalg::Lu::new(b.transpose())?;
    let x = lu.solve(a.transpose());
    let mut out = [[0.0; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            out[i][j] = x[(j, i)];
        }
    }
    Ok(out)
}

pub fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let a = faer::Mat::<f64>::from_fn(4, 4, |i, j| m[i][j]);
    a.determinant()
}

pub fn det8(m: &[[f64; 8]; 8]) -> f64 {
    let a = faer::Mat::<f64>::from_fn(8, 8, |i, j| m[i][j]);
    a.determinant()
}

const PANEL_POINTS: usize = 64;

/// Panel edges in t - t0 for the t = p0 H substitution.
fn t_panels() -> Vec<(f64, f64)> {
    let mut edges = vec![0.0];
    let mut e = 2f64.powi(-12);
    while e <= 128.0 {
        edges.push(e);
        e *= 2.0;
    }
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// ∫d²k∥/(2π)² log det at one imaginary frequency, per unit area.
pub fn per_frequency_with(media: &[Response; 3], kappa: f64, gap: f64, points: usize) -> f64 {
    let (x, w) = gauss_legendre(points);
    let n0 = (media[0].eps * media[0].mu).sqrt();
    let t0 = n0 * kappa * gap;
    let mut acc = 0.0;
    for (a, b) in t_panels() {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        for (xi, wi) in x.iter().zip(&w) {
            let t = t0 + c + h * xi;
            let p0 = t / gap;
            let k2 = (p0 * p0 - n0 * n0 * kappa * kappa).max(0.0);
            // p_r from p0 so that equal media give equal momenta exactly
            let pr = |r: &Response| {
                if kappa == 0.0 || r.eps.is_infinite() {
                    k2.sqrt()
                } else {
                    (p0 * p0 + (r.eps * r.mu - n0 * n0) * kappa * kappa).sqrt()
                }
            };
            let m = PlanarMomenta { k_par: k2.sqrt(), kappa, p0, p1: pr(&media[1]), p2: pr(&media[2]) };
            acc += wi * h * t * lifshitz_log_det(&m, media, gap);
        }
    }
    // k dk = p0 dp0 = t dt / H²
    acc / (2.0 * PI * gap * gap)
}

pub fn per_frequency(media: &[Response; 3], kappa: f64, gap: f64) -> f64 {
    per_frequency_with(media, kappa, gap, PANEL_POINTS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlabEnergy {
    pub free_energy_per_area: f64,
    pub report: SumReport,
}

pub fn free_energy_per_area(cfg: &SlabConfig) -> Result<SlabEnergy> {
    cfg.validate()?;
    let thermal = ThermalSpec { xi_scale: 1.0 / cfg.gap, ..cfg.thermal };
    let report = weighted_sum(
        |xi| {
            let media = cfg.responses(xi)?;
            Ok(per_frequency(&media, xi, cfg.gap))
        },
        &thermal,
    )?;
    Ok(SlabEnergy { free_energy_per_area: report.value, report })
}

/// -∂(F/A)/∂H by central differences with step 10⁻³ H and one
/// Richardson level.
pub fn pressure(cfg: &SlabConfig) -> Result<f64> {
    cfg.validate()?;
    let h = 1e-3 * cfg.gap;
    let f = |gap: f64| -> Result<f64> {
        let c = SlabConfig { gap, ..cfg.clone() };
        Ok(free_energy_per_area(&c)?.free_energy_per_area)
    };
    let d1 = (f(cfg.gap + h)? - f(cfg.gap - h)?) / (2.0 * h);
    let d2 = (f(cfg.gap + 0.5 * h)? - f(cfg.gap - 0.5 * h)?) / h;
    Ok(-(4.0 * d2 - d1) / 3.0)
}
