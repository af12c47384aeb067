//! Matsubara frequencies and the primed frequency sum.
//!
//! Finite temperature: ξ_n = 2πnT with weight T (n ≥ 1) and T/2 (n = 0),
//! so the weighted sum already carries the k_B T prefactor. At T = 0 the
//! sum becomes (1/2π)∫dξ.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre_on;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalMode {
    FiniteT,
    ZeroT,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    pub temperature: f64,
    pub n_max: usize,
    pub rel_tol: f64,
    pub mode: ThermalMode,
    /// Frequency scale for the T = 0 panels, typically 1/gap.
    pub xi_scale: f64,
}

impl ThermalSpec {
    pub fn finite(temperature: f64) -> Self {
        ThermalSpec {
            temperature,
            n_max: 10_000,
            rel_tol: 1e-8,
            mode: ThermalMode::FiniteT,
            xi_scale: 1.0,
        }
    }

    pub fn zero() -> Self {
        ThermalSpec {
            temperature: 0.0,
            n_max: 10_000,
            rel_tol: 1e-8,
            mode: ThermalMode::ZeroT,
            xi_scale: 1.0,
        }
    }

    pub fn with_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_scale(mut self, xi_scale: f64) -> Self {
        self.xi_scale = xi_scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Domain(format!("rel_tol must lie in (0,1), got {}", self.rel_tol)));
        }
        if self.n_max == 0 {
            return Err(Error::Domain("n_max must be positive".into()));
        }
        if !(self.xi_scale > 0.0 && self.xi_scale.is_finite()) {
            return Err(Error::Domain("xi_scale must be positive".into()));
        }
        match self.mode {
            ThermalMode::ZeroT if self.temperature != 0.0 => {
                Err(Error::Domain("zero-temperature mode requires temperature = 0".into()))
            }
            ThermalMode::FiniteT if !(self.temperature > 0.0 && self.temperature.is_finite()) => {
                Err(Error::Domain("finite-temperature mode requires temperature > 0".into()))
            }
            _ => Ok(()),
        }
    }
}

/// (ξ_n, weight) for n = 0..count.
pub fn frequencies(spec: &ThermalSpec, count: usize) -> Result<Vec<(f64, f64)>> {
    if spec.mode == ThermalMode::ZeroT {
        return Err(Error::Domain("zero-temperature mode has no discrete frequencies; use weighted_sum".into()));
    }
    spec.validate()?;
    let t = spec.temperature;
    Ok((0..count)
        .map(|n| {
            let w = if n == 0 { 0.5 * t } else { t };
            (2.0 * PI * n as f64 * t, w)
        })
        .collect())
}

/// One evaluated node of the sum or integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyTerm {
    pub xi: f64,
    pub weight: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumReport {
    pub value: f64,
    pub converged: bool,
    pub terms: Vec<FrequencyTerm>,
}

impl SumReport {
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }
}

const SMALL_RUN: usize = 3;
const MAX_PANELS: usize = 80;
const PANEL_ORDER: usize = 12;

/// Primed Matsubara sum (FiniteT) or (1/2π)∫dξ (ZeroT) of `term`.
pub fn weighted_sum<F>(term: F, spec: &ThermalSpec) -> Result<SumReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    spec.validate()?;
    match spec.mode {
        ThermalMode::FiniteT => finite_sum(&term, spec),
        ThermalMode::ZeroT => zero_t_integral(&term, spec),
    }
}

fn finite_sum<F>(term: &F, spec: &ThermalSpec) -> Result<SumReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let t = spec.temperature;
    let batch = rayon::current_num_threads().max(1);
    let mut acc = 0.0;
    let mut small = 0;
    let mut terms = Vec::new();
    let mut n = 0usize;
    while n < spec.n_max {
        let hi = (n + batch).min(spec.n_max);
        let vals: Vec<Result<f64>> = (n..hi)
            .into_par_iter()
            .map(|k| term(2.0 * PI * k as f64 * t))
            .collect();
        for (k, v) in (n..hi).zip(vals) {
            let v = v?;
            let w = if k == 0 { 0.5 * t } else { t };
            let xi = 2.0 * PI * k as f64 * t;
            acc += w * v;
            terms.push(FrequencyTerm { xi, weight: w, value: v });
            if (w * v).abs() <= spec.rel_tol * acc.abs() || (v == 0.0 && acc == 0.0) {
                small += 1;
            } else {
                small = 0;
            }
            if small >= SMALL_RUN {
                return Ok(SumReport { value: acc, converged: true, terms });
            }
        }
        n = hi;
    }
    Ok(SumReport { value: acc, converged: false, terms })
}

fn panel<F>(term: &F, a: f64, b: f64) -> Result<(f64, Vec<FrequencyTerm>)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let nodes = gauss_legendre_on(a, b, PANEL_ORDER);
    let vals: Vec<Result<f64>> = nodes.par_iter().map(|&(x, _)| term(x)).collect();
    let mut s = 0.0;
    let mut terms = Vec::with_capacity(nodes.len());
    for ((x, w), v) in nodes.into_iter().zip(vals) {
        let v = v?;
        let w = w / (2.0 * PI);
        s += w * v;
        terms.push(FrequencyTerm { xi: x, weight: w, value: v });
    }
    Ok((s, terms))
}

fn adaptive<F>(term: &F, a: f64, b: f64, whole: (f64, Vec<FrequencyTerm>), tol: f64, depth: usize) -> Result<(f64, Vec<FrequencyTerm>)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let m = 0.5 * (a + b);
    let left = panel(term, a, m)?;
    let right = panel(term, m, b)?;
    let split = left.0 + right.0;
    if (split - whole.0).abs() <= tol || depth == 0 {
        let mut t = left.1;
        t.extend(right.1);
        return Ok((split, t));
    }
    let l = adaptive(term, a, m, left, 0.5 * tol, depth - 1)?;
    let r = adaptive(term, m, b, right, 0.5 * tol, depth - 1)?;
    let mut t = l.1;
    t.extend(r.1);
    Ok((l.0 + r.0, t))
}

fn zero_t_integral<F>(term: &F, spec: &ThermalSpec) -> Result<SumReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    // panels [0, s/64], then doubling widths out to the decay scale
    let mut a = 0.0;
    let mut b = spec.xi_scale / 64.0;
    let mut acc: f64 = 0.0;
    let mut small = 0;
    let mut terms = Vec::new();
    for _ in 0..MAX_PANELS {
        let whole = panel(term, a, b)?;
        let tol = spec.rel_tol * whole.0.abs().max(acc.abs()) * 0.1;
        let (contrib, t) = adaptive(term, a, b, whole, tol, 6)?;
        terms.extend(t);
        acc += contrib;
        if contrib.abs() <= spec.rel_tol * acc.abs() || (contrib == 0.0 && acc == 0.0) {
            small += 1;
        } else {
            small = 0;
        }
        if small >= SMALL_RUN {
            return Ok(SumReport { value: acc, converged: true, terms });
        }
        a = b;
        b *= 2.0;
    }
    Ok(SumReport { value: acc, converged: false, terms })
}
