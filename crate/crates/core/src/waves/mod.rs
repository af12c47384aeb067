//! Spherical partial waves on the imaginary frequency axis: the multipole
//! expansion of the free dyadic Green function, T-matrices extracted from
//! the boundary-element kernel, translation matrices along ẑ and the
//! two-body scattering formula.
//!
//! Only a vacuum outer medium is supported. Wavenumbers are κ = ξ.
//!
//! Conventions: complex Y_lm with the Condon–Shortley phase; outgoing
//! waves use (2/π) k_l; the expansion of the Green function pairs
//! Φ_{plm} with (−1)^m Φ_{pl,−m} and carries λ = −4πκ³.

pub mod bessel;
mod expansion;
mod scattering;
mod tmatrix;
mod translation;
pub mod vsh;

pub use expansion::{green_series, verify_pw_expansion, PwResidual};
pub use scattering::{
    scattering_energy, scattering_energy_adaptive, scattering_energy_full, scattering_free_energy, AdaptiveEnergy,
    ScatteringFreeEnergy,
};
pub use tmatrix::{tmatrix_from_surface, TMatrix};
pub use translation::{translation_matrix, translation_matrix_21, TranslationMatrix, PROJECTION_TOL};
pub use vsh::{spherical_harmonic, spherical_wave, CVec3, PointWaves};

use crate::error::{Error, Result};

/// λ = −4πκ³.
pub fn lambda(kappa: f64) -> f64 {
    -4.0 * std::f64::consts::PI * kappa.powi(3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    M,
    N,
}

impl Polarization {
    /// τ(M) = N, τ(N) = M.
    pub fn dual(self) -> Polarization {
        match self {
            Polarization::M => Polarization::N,
            Polarization::N => Polarization::M,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Regular,
    Outgoing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldType {
    E,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartialWaveIndex {
    pub p: Polarization,
    pub l: usize,
    pub m: i64,
}

impl PartialWaveIndex {
    pub fn new(p: Polarization, l: usize, m: i64) -> Result<Self> {
        let idx = PartialWaveIndex { p, l, m };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.m.unsigned_abs() as usize > self.l {
            return Err(Error::Domain(format!("invalid partial wave l = {}, m = {}", self.l, self.m)));
        }
        Ok(())
    }

    /// Same wave with m → −m.
    pub fn flipped(&self) -> Self {
        PartialWaveIndex { m: -self.m, ..*self }
    }
}

/// All partial waves up to l_max, ordered by l, then m = −l..=l, then M
/// before N. [`mode_position`] inverts the ordering.
pub fn modes(l_max: usize) -> Vec<PartialWaveIndex> {
    let mut out = Vec::with_capacity(2 * l_max * (l_max + 2));
    for l in 1..=l_max {
        for m in -(l as i64)..=l as i64 {
            for p in [Polarization::M, Polarization::N] {
                out.push(PartialWaveIndex { p, l, m });
            }
        }
    }
    out
}

pub fn mode_position(idx: &PartialWaveIndex) -> usize {
    let before = idx.l * idx.l - 1;
    let pos = before + (idx.m + idx.l as i64) as usize;
    2 * pos + usize::from(idx.p == Polarization::N)
}

/// (p, l) pairs of one m block, l from max(1, |m|) to l_max, M before N.
pub fn block_modes(l_max: usize, m: i64) -> Vec<(Polarization, usize)> {
    let l0 = (m.unsigned_abs() as usize).max(1);
    (l0..=l_max).flat_map(|l| [(Polarization::M, l), (Polarization::N, l)]).collect()
}
