//! Quadrature rules: Gauss–Legendre on intervals, symmetric triangle rules.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1], Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "need at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Nodes and weights mapped onto [a, b].
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    x.iter().zip(&w).map(|(&xi, &wi)| (c + h * xi, h * wi)).collect()
}

/// Integrates `f` over [a, b] with `n`-point rule.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    gauss_legendre_on(a, b, n).into_iter().map(|(x, w)| w * f(x)).sum()
}

/// Barycentric triangle rule: (l0, l1, l2, weight) with weights summing to 1.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 4]>,
}

impl TriangleRule {
    /// Degree-2, three interior points.
    pub fn strang3() -> Self {
        let a = 2.0 / 3.0;
        let b = 1.0 / 6.0;
        let w = 1.0 / 3.0;
        TriangleRule {
            points: vec![[a, b, b, w], [b, a, b, w], [b, b, a, w]],
        }
    }

    /// Dunavant degree-5, seven points.
    pub fn dunavant7() -> Self {
        let (a1, b1) = (0.059_715_871_789_770, 0.470_142_064_105_115);
        let (a2, b2) = (0.797_426_985_353_087, 0.101_286_507_323_456);
        let w0 = 0.225;
        let w1 = 0.132_394_152_788_506;
        let w2 = 0.125_939_180_544_827;
        let t = 1.0 / 3.0;
        TriangleRule {
            points: vec![
                [t, t, t, w0],
                [a1, b1, b1, w1],
                [b1, a1, b1, w1],
                [b1, b1, a1, w1],
                [a2, b2, b2, w2],
                [b2, a2, b2, w2],
                [b2, b2, a2, w2],
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((s - exact).abs() < 1e-13, "n={n} deg={deg} {s} {exact}");
            }
        }
    }

    #[test]
    fn triangle_rules_sum_to_one_and_hit_degree() {
        for (rule, deg) in [(TriangleRule::strang3(), 2), (TriangleRule::dunavant7(), 5)] {
            let ws: f64 = rule.points.iter().map(|p| p[3]).sum();
            assert!((ws - 1.0).abs() < 1e-12);
            // mean of l0^a l1^b over the reference triangle = 2 a! b! / (a+b+2)!
            for a in 0..=deg {
                for b in 0..=(deg - a) {
                    let q: f64 = rule.points.iter().map(|p| p[3] * p[0].powi(a) * p[1].powi(b)).sum();
                    let fact = |k: i32| (1..=k).map(|v| v as f64).product::<f64>();
                    let exact = 2.0 * fact(a) * fact(b) / fact(a + b + 2);
                    assert!((q - exact).abs() < 1e-12, "a={a} b={b}");
                }
            }
        }
    }
}
