//! Casimir forces: trace formula and finite differences of the energy.

use faer::Mat;

use super::assembly::{
    add_medium, media_at, pair_grad_ops_prepared, EdgeOps, Prepared, QuadratureLevels, Representation, System,
};
use super::energy::{at_frequency, bodies_scale, min_gap, term_from_system, Route, STATIC_KAPPA};
use super::mesh::BodyMesh;
use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::materials::{MediumAssignment, Response};
use crate::matsubara::{weighted_sum, SumReport, ThermalSpec};
use crate::vec3::{normalize, scale, Vec3};

fn combine(ops: &EdgeOps, med: Response, kappa: f64) -> Mat<f64> {
    let mut m = Mat::zeros(2 * ops.v.nrows(), 2 * ops.v.ncols());
    add_medium(&mut m, 0, 0, ops, med, kappa, Representation::Surface, 1.0, 1.0);
    m
}

/// Per-frequency force on body r, Tr[𝒦 ∂Ĝ⁽⁰⁾/∂x_r] with 𝒦 = −M̂⁻¹; the
/// derivative touches only the blocks coupling r to the other bodies.
pub fn force_trace(bodies: &[BodyMesh], media: &MediumAssignment, kappa: f64, body_index: usize) -> Result<Vec3> {
    if body_index >= bodies.len() {
        return Err(Error::Domain(format!("body index {body_index} out of range")));
    }
    if bodies.len() < 2 {
        return Ok([0.0; 3]);
    }
    let levels = QuadratureLevels::new(bodies);
    let sys = System::assemble_with(bodies, media, kappa, Some(&levels))?;
    let full = sys.kernel(Representation::Surface)?;
    let minv = Lu::new(full.mat.as_ref())?.inverse();
    let k0 = kappa * (sys.outer.eps * sys.outer.mu).sqrt();
    let pr = Prepared::new(&bodies[body_index]);
    let br = sys.layout.block(body_index);
    let mut f = [0.0; 3];
    for s in 0..bodies.len() {
        if s == body_index {
            continue;
        }
        let ps = Prepared::new(&bodies[s]);
        let bs = sys.layout.block(s);
        // levels are stored for r < s; transpose the map when needed
        let (lo, hi) = (body_index.min(s), body_index.max(s));
        let stored = &levels.pairs.iter().find(|(k, _)| *k == (lo, hi)).expect("pair levels").1;
        let lv: Vec<u8> = if body_index < s {
            stored.clone()
        } else {
            let (na, nb) = (bodies[body_index].n_panels(), bodies[s].n_panels());
            (0..na * nb).map(|i| stored[(i % nb) * na + i / nb]).collect()
        };
        let grads = pair_grad_ops_prepared(&pr, &ps, k0, Some(&lv));
        for (t, g) in grads.iter().enumerate() {
            // dM has D at (r, s) and S Dᵀ S at (s, r), S = diag(1, -1) on
            // the (E, H) halves
            let d = combine(g, sys.outer, kappa);
            let (hr, hs) = (br.len() / 2, bs.len() / 2);
            let mut tr = 0.0;
            for j in 0..bs.len() {
                for i in 0..br.len() {
                    let sg = if (i < hr) == (j < hs) { 1.0 } else { -1.0 };
                    tr += d[(i, j)] * (minv[(bs.start + j, br.start + i)] + sg * minv[(br.start + i, bs.start + j)]);
                }
            }
            f[t] -= tr;
        }
    }
    Ok(f)
}

/// Self-block trace Tr[𝒦_rr D_rr] of an isolated body, D_rr the derivative
/// of M̂_r with respect to its first argument only. Vanishes by reciprocity;
/// a discretization diagnostic.
pub fn self_force_trace(body: &BodyMesh, media: &MediumAssignment, kappa: f64) -> Result<Vec3> {
    let (outer, inner) = media_at(media, std::slice::from_ref(body), kappa)?;
    let sys = System::assemble(std::slice::from_ref(body), media, kappa)?;
    let m = sys.self_block(0, Representation::Surface);
    let minv = Lu::new(m.as_ref())?.inverse();
    let p = Prepared::new(body);
    let mut f = [0.0; 3];
    for med in [outer, inner[0]] {
        let k = kappa * (med.eps * med.mu).sqrt();
        let grads = pair_grad_ops_prepared(&p, &p, k, None);
        for (t, g) in grads.iter().enumerate() {
            let d = combine(g, med, kappa);
            let mut tr = 0.0;
            for j in 0..d.ncols() {
                for i in 0..d.nrows() {
                    tr += d[(i, j)] * minv[(j, i)];
                }
            }
            f[t] -= tr;
        }
    }
    Ok(f)
}

fn displaced(bodies: &[BodyMesh], r: usize, d: Vec3) -> Vec<BodyMesh> {
    let mut out = bodies.to_vec();
    out[r] = out[r].translated(d);
    out
}

/// Per-frequency central difference −∂/∂x of the energy term with one
/// Richardson level, step h = 10⁻³ × (closest gap).
pub fn force_fd_term(
    bodies: &[BodyMesh],
    media: &MediumAssignment,
    kappa: f64,
    body_index: usize,
    direction: Vec3,
) -> Result<f64> {
    if body_index >= bodies.len() {
        return Err(Error::Domain(format!("body index {body_index} out of range")));
    }
    if bodies.len() < 2 {
        return Ok(0.0);
    }
    let u = normalize(direction);
    if !u.iter().all(|c| c.is_finite()) {
        return Err(Error::Domain("force direction must be a non-zero vector".into()));
    }
    let h = 1e-3 * min_gap(bodies);
    let levels = QuadratureLevels::new(bodies);
    let e = |s: f64| {
        let moved = displaced(bodies, body_index, scale(u, s));
        let sys = System::assemble_with(&moved, media, kappa, Some(&levels))?;
        term_from_system(&sys, Representation::Surface, Route::Kernel)
    };
    let d1 = (e(h)? - e(-h)?) / (2.0 * h);
    let d2 = (e(0.5 * h)? - e(-0.5 * h)?) / h;
    Ok(-(4.0 * d2 - d1) / 3.0)
}

/// Force along `direction` on body r from the free energy: the finite
/// difference is taken frequency by frequency on the same nodes, which
/// equals differencing the summed free energy.
pub fn force_fd(
    bodies: &[BodyMesh],
    media: &MediumAssignment,
    thermal: &ThermalSpec,
    body_index: usize,
    direction: Vec3,
) -> Result<(f64, SumReport)> {
    if bodies.len() < 2 {
        let spec = *thermal;
        spec.validate()?;
        return Ok((0.0, SumReport { value: 0.0, converged: true, terms: Vec::new() }));
    }
    let kappa0 = STATIC_KAPPA / bodies_scale(bodies);
    let mut spec = *thermal;
    spec.xi_scale = 1.0 / min_gap(bodies);
    let report = weighted_sum(
        |xi| at_frequency(xi, kappa0, |k| force_fd_term(bodies, media, k, body_index, direction)),
        &spec,
    )?;
    Ok((report.value, report))
}

/// Force vector from the trace formula summed over frequencies.
pub fn force_trace_total(
    bodies: &[BodyMesh],
    media: &MediumAssignment,
    thermal: &ThermalSpec,
    body_index: usize,
) -> Result<(Vec3, [SumReport; 3])> {
    let kappa0 = STATIC_KAPPA / bodies_scale(bodies).max(f64::MIN_POSITIVE);
    let mut spec = *thermal;
    if bodies.len() >= 2 {
        spec.xi_scale = 1.0 / min_gap(bodies);
    }
    // one sum per component; the trace is cached per node
    let cache = std::sync::Mutex::new(std::collections::HashMap::<u64, Vec3>::new());
    let eval = |xi: f64| -> Result<Vec3> {
        if let Some(v) = cache.lock().expect("cache lock").get(&xi.to_bits()) {
            return Ok(*v);
        }
        let v = if xi > 0.0 {
            force_trace(bodies, media, xi, body_index)?
        } else {
            let a = force_trace(bodies, media, 0.5 * kappa0, body_index)?;
            let b = force_trace(bodies, media, kappa0, body_index)?;
            [2.0 * a[0] - b[0], 2.0 * a[1] - b[1], 2.0 * a[2] - b[2]]
        };
        cache.lock().expect("cache lock").insert(xi.to_bits(), v);
        Ok(v)
    };
    let rx = weighted_sum(|xi| Ok(eval(xi)?[0]), &spec)?;
    let ry = weighted_sum(|xi| Ok(eval(xi)?[1]), &spec)?;
    let rz = weighted_sum(|xi| Ok(eval(xi)?[2]), &spec)?;
    Ok(([rx.value, ry.value, rz.value], [rx, ry, rz]))
}
