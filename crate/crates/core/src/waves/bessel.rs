//! Modified spherical Bessel functions on the positive real axis.
//!
//! `i_l(z) = √(π/2z) I_{l+1/2}(z)` and `k_l(z) = √(π/2z) K_{l+1/2}(z)`, so
//! k_0(z) = (π/2) e^{-z}/z. Outgoing partial waves use the rescaled
//! (2/π) k_l, for which e^{-κ|x-x'|}/|x-x'| = 4πκ Σ_l i_l(κr<) (2/π)k_l(κr>) Σ_m Y Y*.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// i_l(z) for l = 0..=l_max by the power series, which has only positive
/// terms. Also returns i_l(z)/z for l ≥ 1 (finite at z = 0; entry 0 unused).
pub fn bessel_i(l_max: usize, z: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("bessel argument must be finite and ≥ 0, got {z}")));
    }
    let h = 0.5 * z * z;
    let mut vals = vec![0.0; l_max + 1];
    let mut over_z = vec![0.0; l_max + 1];
    // z^l / (2l+1)!!, carried along l
    let mut pre = 1.0;
    // z^{l-1} / (2l+1)!!
    let mut pre_z = 0.0;
    for l in 0..=l_max {
        if l >= 1 {
            pre_z = if l == 1 { 1.0 / 3.0 } else { pre_z * z / (2 * l + 1) as f64 };
            pre *= z / (2 * l + 1) as f64;
        }
        let mut t = 1.0;
        let mut s = 1.0;
        let mut k = 1;
        loop {
            t *= h / (k as f64 * (2 * l + 2 * k + 1) as f64);
            s += t;
            if t <= 1e-17 * s {
                break;
            }
            k += 1;
        }
        vals[l] = pre * s;
        over_z[l] = pre_z * s;
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("i_l overflows at z = {z}")));
    }
    Ok((vals, over_z))
}

/// k_l(z) for l = 0..=l_max by upward recurrence, z > 0.
pub fn bessel_k(l_max: usize, z: f64) -> Result<Vec<f64>> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Singular(format!("k_l needs a finite argument > 0, got {z}")));
    }
    let e = FRAC_PI_2 * (-z).exp();
    let mut k = Vec::with_capacity(l_max + 1);
    k.push(e / z);
    if l_max >= 1 {
        k.push(e * (1.0 / z + 1.0 / (z * z)));
    }
    for l in 1..l_max {
        let next = k[l - 1] + (2 * l + 1) as f64 / z * k[l];
        k.push(next);
    }
    Ok(k)
}

/// Radial profiles of one partial wave: f, f/z and (f + z f')/z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radial {
    pub f: f64,
    pub f_over_z: f64,
    pub df_over_z: f64,
}

/// Regular radial profiles for l = 1..=l_max (index 0 unused).
pub fn regular_profiles(l_max: usize, z: f64) -> Result<Vec<Radial>> {
    let (i, iz) = bessel_i(l_max, z)?;
    let mut out = vec![Radial { f: i[0], f_over_z: 0.0, df_over_z: 0.0 }; l_max + 1];
    for l in 1..=l_max {
        // (i_l + z i_l')/z = i_{l-1} - l i_l / z
        out[l] = Radial { f: i[l], f_over_z: iz[l], df_over_z: i[l - 1] - l as f64 * iz[l] };
    }
    Ok(out)
}

/// Outgoing radial profiles of (2/π) k_l for l = 1..=l_max.
pub fn outgoing_profiles(l_max: usize, z: f64) -> Result<Vec<Radial>> {
    let k = bessel_k(l_max, z)?;
    let c = 1.0 / FRAC_PI_2;
    let mut out = vec![Radial { f: c * k[0], f_over_z: 0.0, df_over_z: 0.0 }; l_max + 1];
    for l in 1..=l_max {
        // (k_l + z k_l')/z = -k_{l-1} - l k_l / z
        let f = c * k[l];
        out[l] = Radial { f, f_over_z: f / z, df_over_z: -c * k[l - 1] - l as f64 * f / z };
    }
    Ok(out)
}
