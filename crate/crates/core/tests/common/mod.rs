//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// i_l(z) by Miller's downward recurrence i_{n-1} = i_{n+1} + (2n+1)/z i_n,
/// normalised to i_0 = sinh z / z, and its derivative
/// i_l' = i_{l-1} − (l+1) i_l / z.
pub fn i_l(l: usize, z: f64) -> (f64, f64) {
    let top = l + 40 + (2.0 * z) as usize;
    let mut seq = vec![0.0; top + 2];
    seq[top] = 1e-300;
    for n in (1..=top).rev() {
        seq[n - 1] = seq[n + 1] + (2 * n + 1) as f64 / z * seq[n];
        if seq[n - 1] > 1e250 {
            for v in seq.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let scale = (z.sinh() / z) / seq[0];
    let v = seq[l] * scale;
    let d = if l == 0 { seq[1] * scale } else { seq[l - 1] * scale - (l + 1) as f64 * v / z };
    (v, d)
}

/// k_l(z) = (π/2) e^{-z}/z Σ_j (l+j)!/(j!(l-j)!) (2z)^{-j} and its derivative.
pub fn k_l(l: usize, z: f64) -> (f64, f64) {
    let poly = |z: f64| {
        let mut s = 0.0;
        let mut c = 1.0;
        for j in 0..=l {
            if j > 0 {
                c *= ((l + j) * (l - j + 1)) as f64 / j as f64;
            }
            s += c / (2.0 * z).powi(j as i32);
        }
        FRAC_PI_2 * (-z).exp() / z * s
    };
    let h = 1e-6 * z;
    (poly(z), (poly(z + h) - poly(z - h)) / (2.0 * h))
}

/// Mie coefficient of a homogeneous sphere in vacuum, radius 1, for the
/// (2/π)k_l outgoing normalization: the scattered amplitude per unit
/// incident regular amplitude. `electric` selects N waves (ε enters the
/// matching), otherwise M waves (μ).
pub fn mie(l: usize, kappa: f64, eps: f64, mu: f64, electric: bool) -> f64 {
    let x0 = kappa;
    let xr = kappa * (eps * mu).sqrt();
    let (i0, di0) = i_l(l, x0);
    let (k0, dk0) = k_l(l, x0);
    let (ir, dir) = i_l(l, xr);
    let p0 = i0 + x0 * di0;
    let z0 = k0 + x0 * dk0;
    let pr = ir + xr * dir;
    let (a0, ar) = if electric { (1.0, eps) } else { (1.0, mu) };
    FRAC_PI_2 * (a0 * i0 * pr - ar * ir * p0) / (ar * ir * z0 - a0 * k0 * pr)
}

/// Relative difference max-normalized.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}
