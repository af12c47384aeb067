//! Response functions ε(iξ), μ(iξ) on the imaginary frequency axis.
//!
//! The Drude and Plasma parameterizations are a choice made here; the
//! formulation itself only needs real positive ε and μ per medium.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaterialModel {
    Vacuum,
    Constant { eps: f64, mu: f64 },
    /// ε = 1 + ω_p²/(ξ(ξ+γ)); `wp2` is ω_p².
    Drude { wp2: f64, gamma: f64, mu: f64 },
    /// ε = 1 + ω_p²/ξ².
    Plasma { wp2: f64, mu: f64 },
}

impl MaterialModel {
    pub fn constant(eps: f64) -> Self {
        MaterialModel::Constant { eps, mu: 1.0 }
    }

    pub fn magnetic(eps: f64, mu: f64) -> Self {
        MaterialModel::Constant { eps, mu }
    }

    pub fn drude(wp2: f64, gamma: f64) -> Self {
        MaterialModel::Drude { wp2, gamma, mu: 1.0 }
    }

    pub fn plasma(wp2: f64) -> Self {
        MaterialModel::Plasma { wp2, mu: 1.0 }
    }

    /// True when ε diverges at ξ = 0.
    pub fn is_conductor(&self) -> bool {
        matches!(self, MaterialModel::Drude { .. } | MaterialModel::Plasma { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Domain(format!("{what} must be finite and nonnegative")));
        match *self {
            MaterialModel::Vacuum => Ok(()),
            MaterialModel::Constant { eps, mu } => {
                if !(eps.is_finite() && eps >= 1.0) {
                    return Err(Error::Domain(format!("constant eps must be >= 1, got {eps}")));
                }
                if !(mu.is_finite() && mu > 0.0) {
                    return Err(Error::Domain(format!("mu must be > 0, got {mu}")));
                }
                Ok(())
            }
            MaterialModel::Drude { wp2, gamma, mu } => {
                if !(wp2.is_finite() && wp2 >= 0.0) {
                    return bad("plasma frequency squared");
                }
                if !(gamma.is_finite() && gamma >= 0.0) {
                    return bad("relaxation rate");
                }
                if !(mu.is_finite() && mu > 0.0) {
                    return Err(Error::Domain(format!("mu must be > 0, got {mu}")));
                }
                Ok(())
            }
            MaterialModel::Plasma { wp2, mu } => {
                if !(wp2.is_finite() && wp2 >= 0.0) {
                    return bad("plasma frequency squared");
                }
                if !(mu.is_finite() && mu > 0.0) {
                    return Err(Error::Domain(format!("mu must be > 0, got {mu}")));
                }
                Ok(())
            }
        }
    }
}

/// ε(iξ). Conductors at ξ = 0 are rejected; callers take the static
/// limit through [`static_limit`] instead.
pub fn permittivity(model: &MaterialModel, xi: f64) -> Result<f64> {
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::Domain(format!("frequency must be finite and >= 0, got {xi}")));
    }
    match *model {
        MaterialModel::Vacuum => Ok(1.0),
        MaterialModel::Constant { eps, .. } => Ok(eps),
        MaterialModel::Drude { wp2, gamma, .. } => {
            if xi == 0.0 {
                return Err(Error::Domain("Drude permittivity diverges at xi = 0".into()));
            }
            Ok(1.0 + wp2 / (xi * (xi + gamma)))
        }
        MaterialModel::Plasma { wp2, .. } => {
            if xi == 0.0 {
                return Err(Error::Domain("plasma permittivity diverges at xi = 0".into()));
            }
            Ok(1.0 + wp2 / (xi * xi))
        }
    }
}

pub fn permeability(model: &MaterialModel, _xi: f64) -> f64 {
    match *model {
        MaterialModel::Vacuum => 1.0,
        MaterialModel::Constant { mu, .. }
        | MaterialModel::Drude { mu, .. }
        | MaterialModel::Plasma { mu, .. } => mu,
    }
}

/// Response at a single frequency; `eps = +inf` flags a conductor at ξ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    pub eps: f64,
    pub mu: f64,
}

impl Response {
    pub fn new(eps: f64, mu: f64) -> Self {
        Response { eps, mu }
    }

    pub fn vacuum() -> Self {
        Response { eps: 1.0, mu: 1.0 }
    }

    pub fn is_perfect_conductor(&self) -> bool {
        self.eps.is_infinite()
    }
}

/// Static (ξ = 0) response. Conductors come back with `eps = inf`, which
/// the reflection factors turn into rE = -1.
pub fn static_limit(model: &MaterialModel) -> Response {
    match *model {
        MaterialModel::Vacuum => Response::vacuum(),
        MaterialModel::Constant { eps, mu } => Response { eps, mu },
        MaterialModel::Drude { mu, .. } | MaterialModel::Plasma { mu, .. } => Response {
            eps: f64::INFINITY,
            mu,
        },
    }
}

/// ε, μ at ξ with the static limit substituted at ξ = 0.
pub fn response(model: &MaterialModel, xi: f64) -> Result<Response> {
    if xi == 0.0 {
        return Ok(static_limit(model));
    }
    Ok(Response {
        eps: permittivity(model, xi)?,
        mu: permeability(model, xi),
    })
}

/// Outer medium plus one material per body.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumAssignment {
    pub outer: MaterialModel,
    pub bodies: Vec<MaterialModel>,
}

impl MediumAssignment {
    pub fn new(outer: MaterialModel, bodies: Vec<MaterialModel>) -> Result<Self> {
        if bodies.is_empty() {
            return Err(Error::Domain("at least one body medium is required".into()));
        }
        outer.validate()?;
        for b in &bodies {
            b.validate()?;
        }
        Ok(MediumAssignment { outer, bodies })
    }

    pub fn n_bodies(&self) -> usize {
        self.bodies.len()
    }
}
