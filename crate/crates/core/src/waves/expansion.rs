//! Truncated multipole series of the free dyadic Green function, checked
//! against the closed forms of [`crate::green`].

use num_complex::Complex64;

use super::vsh::PointWaves;
use super::{lambda, FieldType, Polarization, WaveKind};
use crate::error::{Error, Result};
use crate::green::dyadic_all;
use crate::vec3::{norm, sub, Mat3, Vec3};

pub type CMat3 = [[Complex64; 3]; 3];

const FIELDS: [FieldType; 2] = [FieldType::E, FieldType::H];

/// G^{αβ}(x, x') from the series up to l_max, indexed [α][β] with E = 0,
/// H = 1:
/// (−1)^{s(β)} λ Σ_{plm} (−1)^m Φ^{α|out}_{plm}(x) ⊗ Φ^{β|reg}_{pl,−m}(x')
/// for |x| > |x'|, regular and outgoing exchanged otherwise.
pub fn green_series(x: Vec3, xp: Vec3, kappa: f64, l_max: usize) -> Result<[[CMat3; 2]; 2]> {
    let (r, rp) = (norm(x), norm(xp));
    if r == rp {
        return Err(Error::Domain("the partial-wave series needs |x| ≠ |x'|".into()));
    }
    let (kx, kp) = if r > rp {
        (WaveKind::Outgoing, WaveKind::Regular)
    } else {
        (WaveKind::Regular, WaveKind::Outgoing)
    };
    let wx = PointWaves::new(x, kappa, kx, l_max)?;
    let wp = PointWaves::new(xp, kappa, kp, l_max)?;
    let lam = lambda(kappa);
    let zero = Complex64::new(0.0, 0.0);
    let mut out = [[[[zero; 3]; 3]; 2]; 2];
    for (a, &fa) in FIELDS.iter().enumerate() {
        for (b, &fb) in FIELDS.iter().enumerate() {
            let sb = if fb == FieldType::H { -1.0 } else { 1.0 };
            let g = &mut out[a][b];
            for l in 1..=l_max {
                for m in -(l as i64)..=l as i64 {
                    let sm = if m % 2 == 0 { 1.0 } else { -1.0 };
                    for p in [Polarization::M, Polarization::N] {
                        let u = wx.field_wave(fa, p, l, m);
                        let v = wp.field_wave(fb, p, l, -m);
                        let c = sb * sm * lam;
                        for i in 0..3 {
                            for j in 0..3 {
                                g[i][j] += c * u[i] * v[j];
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Entrywise |series − closed form| per block, [α][β] as in [`green_series`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PwResidual {
    pub blocks: [[Mat3; 2]; 2],
    /// Largest |Im| of the series entries; the exact blocks are real.
    pub imag: f64,
}

impl PwResidual {
    pub fn max(&self) -> f64 {
        self.blocks.iter().flatten().flatten().flatten().fold(0.0, |a, &b| a.max(b))
    }

    pub fn block_max(&self, a: usize, b: usize) -> f64 {
        self.blocks[a][b].iter().flatten().fold(0.0, |acc, &v| acc.max(v))
    }
}

pub fn verify_pw_expansion(x: Vec3, xp: Vec3, kappa: f64, l_max: usize) -> Result<PwResidual> {
    let series = green_series(x, xp, kappa, l_max)?;
    let exact = dyadic_all(sub(x, xp), 1.0, 1.0, kappa)?;
    let want = [[exact.g_ee, exact.g_eh], [exact.g_he, exact.g_hh]];
    let mut blocks = [[[[0.0; 3]; 3]; 2]; 2];
    let mut imag = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            for i in 0..3 {
                for j in 0..3 {
                    let s = series[a][b][i][j];
                    blocks[a][b][i][j] = (s - want[a][b][i][j]).norm();
                    imag = imag.max(s.im.abs());
                }
            }
        }
    }
    Ok(PwResidual { blocks, imag })
}
