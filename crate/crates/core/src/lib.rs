//! Casimir free energies and forces between homogeneous bodies.
//!
//! Three pipelines share one set of Green functions and material models:
//!
//! * [`lifshitz`]: two half-spaces, closed-form reflection factors;
//! * [`bem`]: Galerkin boundary elements on triangulated closed surfaces;
//! * [`waves`]: spherical partial waves, T-matrices and translation
//!   matrices for the two-sphere scattering formula.
//!
//! Units: ħ = c = k_B = 1. Lengths are in a reference length L, imaginary
//! frequencies ξ and wavenumbers κ = ξ in 1/L, temperatures in ħc/(k_B L).

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bem;
pub mod error;
pub mod green;
pub mod lifshitz;
pub mod linalg;
pub mod materials;
pub mod matsubara;
pub mod quad;
pub mod vec3;
pub mod waves;

pub use error::{Error, Result};

// Book chapters, compiled and run as doc tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/units.md")]
    mod units {}
    #[doc = include_str!("../../../book/src/matsubara.md")]
    mod matsubara {}
    #[doc = include_str!("../../../book/src/lifshitz.md")]
    mod lifshitz {}
    #[doc = include_str!("../../../book/src/bem.md")]
    mod bem {}
    #[doc = include_str!("../../../book/src/waves.md")]
    mod waves {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}
