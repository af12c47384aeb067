//! Dense LU helpers over `faer`.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, MatRef};

use crate::error::{Error, Result};

/// Pivots below this fraction of the largest |entry| count as singular.
pub const PIVOT_FLOOR: f64 = 1e-14;

pub struct Lu {
    inner: faer::linalg::solvers::PartialPivLu<f64>,
    n: usize,
}

impl Lu {
    pub fn new(a: MatRef<'_, f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Domain(format!("LU of a {}x{} matrix", a.nrows(), a.ncols())));
        }
        let n = a.nrows();
        let scale = max_abs(a);
        let inner = a.partial_piv_lu();
        let u = inner.U();
        for i in 0..n {
            let d = u[(i, i)];
            if !d.is_finite() || d.abs() <= PIVOT_FLOOR * scale {
                return Err(Error::Conditioning(format!(
                    "pivot {i} of {n} is {d:e} against matrix scale {scale:e}"
                )));
            }
        }
        Ok(Lu { inner, n })
    }

    /// (log|det|, sign).
    pub fn log_det(&self) -> (f64, f64) {
        let u = self.inner.U();
        let mut logabs = 0.0;
        let mut sign = 1.0;
        for i in 0..self.n {
            let d = u[(i, i)];
            logabs += d.abs().ln();
            if d < 0.0 {
                sign = -sign;
            }
        }
        let (fwd, _) = self.inner.P().arrays();
        if permutation_is_odd(fwd) {
            sign = -sign;
        }
        (logabs, sign)
    }

    pub fn solve(&self, b: MatRef<'_, f64>) -> Mat<f64> {
        self.inner.solve(b)
    }

    pub fn inverse(&self) -> Mat<f64> {
        self.inner.inverse()
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Solves A X = B, factoring `a` in place so that no second copy of a
/// large matrix is held.
pub fn solve_consuming(mut a: Mat<f64>, mut b: Mat<f64>) -> Result<Mat<f64>> {
    use faer::dyn_stack::{MemBuffer, MemStack};
    use faer::linalg::lu::partial_pivoting::{factor, solve};
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::Domain(format!(
            "solve with a {}x{} matrix and {} right-hand rows",
            n,
            a.ncols(),
            b.nrows()
        )));
    }
    let scale = max_abs(a.as_ref());
    let par = faer::get_global_parallelism();
    let mut fwd = vec![0usize; n];
    let mut bwd = vec![0usize; n];
    let mut buf = MemBuffer::new(factor::lu_in_place_scratch::<usize, f64>(n, n, par, Default::default()));
    let (_, perm) =
        factor::lu_in_place(a.as_mut(), &mut fwd, &mut bwd, par, MemStack::new(&mut buf), Default::default());
    for i in 0..n {
        let d = a[(i, i)];
        if !d.is_finite() || d.abs() <= PIVOT_FLOOR * scale {
            return Err(Error::Conditioning(format!("pivot {i} of {n} is {d:e} against matrix scale {scale:e}")));
        }
    }
    let mut buf = MemBuffer::new(solve::solve_in_place_scratch::<usize, f64>(n, b.ncols(), par));
    solve::solve_in_place(a.as_ref(), a.as_ref(), perm, b.as_mut(), par, MemStack::new(&mut buf));
    Ok(b)
}

fn permutation_is_odd(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut odd = false;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

pub fn max_abs(a: MatRef<'_, f64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].abs());
        }
    }
    m
}

/// log det of a matrix expected to have positive determinant.
pub fn log_det_positive(a: MatRef<'_, f64>) -> Result<f64> {
    let (l, s) = Lu::new(a)?.log_det();
    if s < 0.0 {
        return Err(Error::Conditioning(format!(
            "determinant came out negative (log|det| = {l:e})"
        )));
    }
    Ok(l)
}

/// log det(I + E) by unpivoted elimination on E itself, so the diagonal
/// keeps full relative precision when E is small. Falls back to pivoted LU
/// of I + E when a pivot 1 + e_kk gets close to zero.
pub fn log_det_identity_plus(e: &Mat<f64>) -> Result<(f64, f64)> {
    let n = e.nrows();
    if e.ncols() != n {
        return Err(Error::Domain(format!("log det of a {}x{} matrix", n, e.ncols())));
    }
    let mut a = e.clone();
    const NB: usize = 64;
    let par = faer::get_global_parallelism();
    let mut k0 = 0;
    while k0 < n {
        let kb = NB.min(n - k0);
        let end = k0 + kb;
        for k in k0..end {
            let piv = 1.0 + a[(k, k)];
            if !(piv.abs() > 1e-3) {
                return fallback(e);
            }
            for i in k + 1..n {
                a[(i, k)] /= piv;
            }
            for j in k + 1..end {
                let ukj = a[(k, j)];
                if ukj != 0.0 {
                    for i in k + 1..n {
                        let l = a[(i, k)];
                        a[(i, j)] -= l * ukj;
                    }
                }
            }
        }
        if end < n {
            // U12 = L11⁻¹ S12
            for k in k0..end {
                for i in k + 1..end {
                    let l = a[(i, k)];
                    if l != 0.0 {
                        for j in end..n {
                            let u = a[(k, j)];
                            a[(i, j)] -= l * u;
                        }
                    }
                }
            }
            let (top, bottom) = a.as_mut().split_at_row_mut(end);
            let u12 = top.as_ref().submatrix(k0, end, kb, n - end);
            let (l21, a22) = bottom.split_at_col_mut(end);
            let l21 = l21.as_ref().subcols(k0, kb);
            faer::linalg::matmul::matmul(a22, faer::Accum::Add, l21, u12, -1.0, par);
        }
        k0 = end;
    }
    let mut logabs = 0.0;
    let mut sign = 1.0;
    for k in 0..n {
        let d = a[(k, k)];
        if d < -1.0 {
            sign = -sign;
        }
        logabs += if d > -1.0 { d.ln_1p() } else { (-1.0 - d).ln() };
    }
    Ok((logabs, sign))
}

fn fallback(e: &Mat<f64>) -> Result<(f64, f64)> {
    let n = e.nrows();
    let mut s = e.clone();
    for k in 0..n {
        s[(k, k)] += 1.0;
    }
    Ok(Lu::new(s.as_ref())?.log_det())
}

/// log det of a complex matrix as log|det| + i arg(det), arg in (−π, π].
pub fn log_det_complex(a: MatRef<'_, faer::c64>) -> Result<faer::c64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Domain(format!("log det of a {}x{} matrix", n, a.ncols())));
    }
    let lu = a.partial_piv_lu();
    let u = lu.U();
    let mut logabs = 0.0;
    let mut arg = 0.0;
    for i in 0..n {
        let d = u[(i, i)];
        if !(d.norm() > 0.0) || !d.re.is_finite() || !d.im.is_finite() {
            return Err(Error::Conditioning(format!("zero or non-finite pivot {i} of {n}")));
        }
        logabs += d.norm().ln();
        arg += d.arg();
    }
    let (fwd, _) = lu.P().arrays();
    if permutation_is_odd(fwd) {
        arg += std::f64::consts::PI;
    }
    let tau = 2.0 * std::f64::consts::PI;
    let t = arg.rem_euclid(tau);
    let arg = if t > std::f64::consts::PI { t - tau } else { t };
    Ok(faer::c64::new(logabs, arg))
}

/// log det(1 + E) for complex E, eliminating on E directly so that small
/// E keep their relative precision. Falls back to pivoted LU of 1 + E when
/// a pivot 1 + e_kk gets small.
pub fn log_det_identity_plus_complex(e: &Mat<faer::c64>) -> Result<faer::c64> {
    use faer::c64;
    let n = e.nrows();
    if e.ncols() != n {
        return Err(Error::Domain(format!("log det of a {}x{} matrix", n, e.ncols())));
    }
    let mut a = e.clone();
    for k in 0..n {
        let piv = c64::new(1.0, 0.0) + a[(k, k)];
        if !(piv.norm() > 1e-3) {
            let s = Mat::from_fn(n, n, |i, j| if i == j { c64::new(1.0, 0.0) + e[(i, j)] } else { e[(i, j)] });
            return log_det_complex(s.as_ref());
        }
        for i in k + 1..n {
            a[(i, k)] /= piv;
        }
        for j in k + 1..n {
            let ukj = a[(k, j)];
            if ukj != c64::new(0.0, 0.0) {
                for i in k + 1..n {
                    let l = a[(i, k)];
                    a[(i, j)] -= l * ukj;
                }
            }
        }
    }
    let mut logabs = 0.0;
    let mut arg = 0.0;
    for k in 0..n {
        let d = a[(k, k)];
        // ln|1 + d| = ½ ln(1 + 2 Re d + |d|²)
        logabs += 0.5 * (2.0 * d.re + d.norm_sqr()).ln_1p();
        arg += d.im.atan2(1.0 + d.re);
    }
    let tau = 2.0 * std::f64::consts::PI;
    let t = arg.rem_euclid(tau);
    let arg = if t > std::f64::consts::PI { t - tau } else { t };
    Ok(faer::c64::new(logabs, arg))
}

/// Checks every entry is finite; reports the first offender.
pub fn check_finite(a: MatRef<'_, f64>) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if !a[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}
