//! Spherical harmonics and the M/N vector partial waves.
//!
//! Y_lm = Q_l^m(cos θ) e^{imφ} with the Condon–Shortley phase, orthonormal
//! on the unit sphere. With f the radial profile (i_l or (2/π)k_l) and
//! z = κr,
//!
//! * Φ_M = ∇×(x φ)/√(l(l+1)) = f [θ̂ (im/sinθ) Y − φ̂ ∂_θY] / √(l(l+1)),
//! * Φ_N = (i/κ) ∇×Φ_M = i [√(l(l+1)) (f/z) Y r̂ + ((f + z f')/z) ∇_Ω Y / √(l(l+1))],
//!
//! and the H-type waves are Φ^H_M = iΦ_N, Φ^H_N = iΦ_M.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::bessel::{outgoing_profiles, regular_profiles, Radial};
use super::{FieldType, PartialWaveIndex, Polarization, WaveKind};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

pub type CVec3 = [Complex64; 3];

/// Normalized associated Legendre values at fixed order |m| for
/// l = 0..=l_max: Q_l^m, u = Q_l^m / sinθ (m ≥ 1) and τ = dQ_l^m/dθ.
/// Entries with l < |m| are zero.
#[derive(Debug, Clone)]
pub struct Legendre {
    pub q: Vec<f64>,
    pub u: Vec<f64>,
    pub tau: Vec<f64>,
}

fn recur(l_max: usize, m: usize, c: f64, start: f64) -> Vec<f64> {
    let mut v = vec![0.0; l_max + 1];
    if m > l_max {
        return v;
    }
    v[m] = start;
    if m < l_max {
        v[m + 1] = c * ((2 * m + 3) as f64).sqrt() * start;
    }
    let a = |l: usize| (((4 * l * l - 1) as f64) / ((l * l - m * m) as f64)).sqrt();
    for l in m + 2..=l_max {
        v[l] = a(l) * (c * v[l - 1] - v[l - 2] / a(l - 1));
    }
    v
}

/// Q_m^m / sin^k θ without the s^k factor, i.e. (−1)^m √((2m+1)!!/(2m)!!/4π) s^(m−k).
fn diagonal(m: usize, s: f64, k: usize) -> f64 {
    let mut q = (0.25 / PI).sqrt();
    for j in 1..=m {
        q *= -(((2 * j + 1) as f64) / ((2 * j) as f64)).sqrt();
    }
    q * s.powi((m - k) as i32)
}

pub fn legendre(l_max: usize, m: usize, theta: f64) -> Legendre {
    let (s, c) = theta.sin_cos();
    let q = recur(l_max, m, c, diagonal(m, s, 0));
    let mut u = vec![0.0; l_max + 1];
    let mut tau = vec![0.0; l_max + 1];
    if m == 0 {
        // dQ_l^0/dθ = √(l(l+1)) Q_l^1
        let q1 = recur(l_max, 1, c, diagonal(1, s, 0));
        for l in 1..=l_max {
            tau[l] = ((l * (l + 1)) as f64).sqrt() * q1[l];
        }
    } else {
        u = recur(l_max, m, c, diagonal(m, s, 1));
        for l in m..=l_max {
            let lower = if l > m { u[l - 1] } else { 0.0 };
            let b = (((2 * l + 1) * (l * l - m * m)) as f64 / (2 * l - 1) as f64).sqrt();
            tau[l] = l as f64 * c * u[l] - b * lower;
        }
    }
    Legendre { q, u, tau }
}

/// Y_lm at a direction, for tests and projections.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return Complex64::new(0.0, 0.0);
    }
    let leg = legendre(l, am, theta);
    let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    Complex64::from_polar(sign * leg.q[l], m as f64 * phi)
}

/// Spherical coordinates and the local frame (r̂, θ̂, φ̂). The origin maps to
/// θ = φ = 0.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub rhat: Vec3,
    pub that: Vec3,
    pub phat: Vec3,
}

impl Frame {
    pub fn new(x: Vec3) -> Frame {
        let rho = x[0].hypot(x[1]);
        let r = rho.hypot(x[2]);
        let theta = if r > 0.0 { rho.atan2(x[2]) } else { 0.0 };
        let phi = if rho > 0.0 { x[1].atan2(x[0]) } else { 0.0 };
        let (s, c) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Frame {
            r,
            theta,
            phi,
            rhat: [s * cp, s * sp, c],
            that: [c * cp, c * sp, -s],
            phat: [-sp, cp, 0.0],
        }
    }
}

/// Partial waves up to l_max at one point, sharing the radial profiles and
/// Legendre tables.
pub struct PointWaves {
    frame: Frame,
    radial: Vec<Radial>,
    l_max: usize,
    tables: Vec<Legendre>,
}

impl PointWaves {
    pub fn new(x: Vec3, kappa: f64, kind: WaveKind, l_max: usize) -> Result<PointWaves> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("kappa must be > 0, got {kappa}")));
        }
        let frame = Frame::new(x);
        let z = kappa * frame.r;
        let radial = match kind {
            WaveKind::Regular => regular_profiles(l_max, z)?,
            WaveKind::Outgoing => {
                if !(frame.r > 0.0) {
                    return Err(Error::Singular("outgoing partial wave at its own origin".into()));
                }
                outgoing_profiles(l_max, z)?
            }
        };
        let tables = (0..=l_max).map(|m| legendre(l_max, m, frame.theta)).collect();
        Ok(PointWaves { frame, radial, l_max, tables })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// E-type wave Φ_{plm}.
    pub fn wave(&self, p: Polarization, l: usize, m: i64) -> CVec3 {
        let zero = Complex64::new(0.0, 0.0);
        let am = m.unsigned_abs() as usize;
        if l == 0 || l > self.l_max || am > l {
            return [zero; 3];
        }
        let t = &self.tables[am];
        let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
        let (q, u, tau) = (sign * t.q[l], sign * t.u[l], sign * t.tau[l]);
        let e = Complex64::from_polar(1.0, m as f64 * self.frame.phi);
        let i = Complex64::new(0.0, 1.0);
        let ll = ((l * (l + 1)) as f64).sqrt();
        let rad = self.radial[l];
        let f = &self.frame;
        let mu = m as f64 * u;
        let mut out = [zero; 3];
        match p {
            Polarization::M => {
                // f [θ̂ (i m u) − φ̂ τ] / √(l(l+1))
                for c in 0..3 {
                    out[c] = e * (rad.f / ll) * Complex64::new(-tau * f.phat[c], mu * f.that[c]);
                }
            }
            Polarization::N => {
                // i [√(l(l+1)) (f/z) Q r̂ + (F/z)/√(l(l+1)) (θ̂ τ + φ̂ i m u)]
                let a = ll * rad.f_over_z * q;
                let b = rad.df_over_z / ll;
                for c in 0..3 {
                    let v = Complex64::new(a * f.rhat[c] + b * tau * f.that[c], b * mu * f.phat[c]);
                    out[c] = i * e * v;
                }
            }
        }
        out
    }

    /// E- or H-type wave.
    pub fn field_wave(&self, field: FieldType, p: Polarization, l: usize, m: i64) -> CVec3 {
        match field {
            FieldType::E => self.wave(p, l, m),
            FieldType::H => {
                let w = self.wave(p.dual(), l, m);
                let i = Complex64::new(0.0, 1.0);
                [i * w[0], i * w[1], i * w[2]]
            }
        }
    }
}

/// Partial wave Φ^{(field|kind)}_{plm}(x).
pub fn spherical_wave(idx: PartialWaveIndex, kind: WaveKind, field: FieldType, x: Vec3, kappa: f64) -> Result<CVec3> {
    idx.validate()?;
    let pw = PointWaves::new(x, kappa, kind, idx.l)?;
    Ok(pw.field_wave(field, idx.p, idx.l, idx.m))
}
