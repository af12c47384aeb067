//! Dispatch from a validated config to the library pipelines.

use std::time::Instant;

use casimir::bem::{self, make_plate_mesh, make_sphere_mesh, read_mesh, BodyMesh, Representation};
use casimir::lifshitz::{self, SlabConfig};
use casimir::materials::MediumAssignment;
use casimir::matsubara::SumReport;
use casimir::waves::{self, Polarization};
use serde::Serialize;

use crate::config::{Command, Geometry, Repr, RunConfig};
use crate::error::{CliError, Context};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Converged,
    Truncated,
}

impl Status {
    fn from(ok: bool) -> Self {
        if ok {
            Status::Converged
        } else {
            Status::Truncated
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::Truncated => "truncated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTerm {
    pub xi: f64,
    pub weight: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TEntry {
    pub p: &'static str,
    pub l: usize,
    pub m: i64,
    pub p2: &'static str,
    pub l2: usize,
    pub m2: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    /// Sweep value: the gap, or the z shift for mesh files.
    pub gap: f64,
    pub temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unknowns: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pressure: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub force: Option<[f64; 3]>,
    pub n_terms: usize,
    pub status: Status,
    pub per_frequency: Vec<FrequencyTerm>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tmatrix: Vec<TEntry>,
    /// Kept out of the result files so they stay reproducible.
    #[serde(skip)]
    pub wall_clock: f64,
}

impl ResultRecord {
    fn new(gap: f64, temperature: f64) -> Self {
        ResultRecord {
            gap,
            temperature,
            unknowns: None,
            l_max: None,
            kappa: None,
            energy: None,
            pressure: None,
            force: None,
            n_terms: 0,
            status: Status::Converged,
            per_frequency: Vec::new(),
            tmatrix: Vec::new(),
            wall_clock: 0.0,
        }
    }

    fn with_report(mut self, r: &SumReport) -> Self {
        self.n_terms = r.n_terms();
        self.status = Status::from(r.converged);
        self.per_frequency = r
            .terms
            .iter()
            .map(|t| FrequencyTerm { xi: t.xi, weight: t.weight, value: t.value })
            .collect();
        self
    }

    fn finite(&self) -> bool {
        let f = |v: Option<f64>| v.map_or(true, f64::is_finite);
        f(self.energy)
            && f(self.pressure)
            && self.force.map_or(true, |v| v.iter().all(|x| x.is_finite()))
            && self.per_frequency.iter().all(|t| t.value.is_finite())
            && self.tmatrix.iter().all(|t| t.re.is_finite() && t.im.is_finite())
    }
}

fn media(cfg: &RunConfig) -> Result<MediumAssignment, CliError> {
    let m = &cfg.materials;
    let bodies = m.bodies.iter().map(|b| b.model()).collect();
    MediumAssignment::new(m.outer.model(), bodies)
        .map_err(|e| CliError::Config { path: "materials".into(), msg: e.to_string() })
}

/// Material index of body `i`: a single entry is shared.
fn material(cfg: &RunConfig, i: usize) -> usize {
    if cfg.materials.bodies.len() == 1 {
        0
    } else {
        i
    }
}

fn bodies(cfg: &RunConfig, value: f64) -> Result<Vec<BodyMesh>, CliError> {
    let refinement = cfg.numerics.refinement;
    let ctx = || format!("building meshes at gap {value}");
    match &cfg.geometry {
        Geometry::Slab { .. } => unreachable!("slab geometry has no meshes"),
        Geometry::Spheres { radius, radius2, .. } => {
            let r2 = radius2.unwrap_or(*radius);
            let a = make_sphere_mesh(*radius, refinement).context(ctx)?;
            let b = make_sphere_mesh(r2, refinement).context(ctx)?;
            Ok(vec![
                a.with_material(material(cfg, 0)),
                b.translated([0.0, 0.0, radius + r2 + value]).with_material(material(cfg, 1)),
            ])
        }
        Geometry::Plates { side, thickness, .. } => {
            let p = make_plate_mesh(*side, *thickness, refinement).context(ctx)?;
            Ok(vec![
                p.clone().with_material(material(cfg, 0)),
                p.translated([0.0, 0.0, thickness + value]).with_material(material(cfg, 1)),
            ])
        }
        Geometry::Meshes { files } => {
            let last = files.len() - 1;
            files
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let mesh = read_mesh(&f.path, material(cfg, i)).map_err(|e| CliError::Config {
                        path: format!("geometry.files[{i}].path"),
                        msg: e.to_string(),
                    })?;
                    let mut d = f.offset;
                    if i == last && files.len() > 1 {
                        d[2] += value;
                    }
                    Ok(mesh.translated(d))
                })
                .collect()
        }
    }
}

fn unknowns(bodies: &[BodyMesh]) -> usize {
    bodies.iter().map(|b| 2 * b.n_edges()).sum()
}

fn lifshitz_point(cfg: &RunConfig, gap: f64) -> Result<ResultRecord, CliError> {
    let m = &cfg.materials.bodies;
    let slab = SlabConfig {
        gap,
        medium0: cfg.materials.outer.model(),
        medium1: m[0].model(),
        medium2: m[m.len() - 1].model(),
        thermal: cfg.thermal.spec(),
    };
    let ctx = || format!("lifshitz at H = {gap}");
    let e = lifshitz::free_energy_per_area(&slab).context(ctx)?;
    let p = lifshitz::pressure(&slab).context(ctx)?;
    let mut r = ResultRecord::new(gap, cfg.thermal.temperature).with_report(&e.report);
    r.energy = Some(e.free_energy_per_area);
    r.pressure = Some(p);
    Ok(r)
}

fn bem_energy_point(cfg: &RunConfig, gap: f64) -> Result<ResultRecord, CliError> {
    let b = bodies(cfg, gap)?;
    let repr = match cfg.numerics.representation {
        Repr::Surface => Representation::Surface,
        Repr::Hamiltonian => Representation::Hamiltonian,
    };
    let e = bem::free_energy(&b, &media(cfg)?, &cfg.thermal.spec(), repr)
        .context(|| format!("bem-energy at gap {gap}"))?;
    let mut r = ResultRecord::new(gap, cfg.thermal.temperature).with_report(&e.convergence);
    r.unknowns = Some(unknowns(&b));
    r.energy = Some(e.total);
    Ok(r)
}

fn force_point(cfg: &RunConfig, gap: f64) -> Result<ResultRecord, CliError> {
    let b = bodies(cfg, gap)?;
    let (f, reports) = bem::force_trace_total(&b, &media(cfg)?, &cfg.thermal.spec(), cfg.numerics.body)
        .context(|| format!("force at gap {gap}"))?;
    // the three components share their frequency nodes
    let mut r = ResultRecord::new(gap, cfg.thermal.temperature).with_report(&reports[2]);
    r.status = Status::from(reports.iter().all(|x| x.converged));
    r.unknowns = Some(unknowns(&b));
    r.force = Some(f);
    Ok(r)
}

fn sphere_sphere_point(cfg: &RunConfig, gap: f64) -> Result<ResultRecord, CliError> {
    let b = bodies(cfg, gap)?;
    let n = &cfg.numerics;
    let e = waves::scattering_free_energy(
        [&b[0], &b[1]],
        &media(cfg)?,
        &cfg.thermal.spec(),
        n.l_max,
        n.l_cap.unwrap_or(n.l_max),
        n.multipole_tol,
    )
    .context(|| format!("sphere-sphere at gap {gap}"))?;
    let mut r = ResultRecord::new(gap, cfg.thermal.temperature).with_report(&e.report);
    r.status = Status::from(e.report.converged && e.multipoles_converged);
    r.l_max = Some(e.l_max);
    r.energy = Some(e.total);
    Ok(r)
}

fn pol(p: Polarization) -> &'static str {
    match p {
        Polarization::M => "M",
        Polarization::N => "N",
    }
}

fn tmatrix_point(cfg: &RunConfig) -> Result<ResultRecord, CliError> {
    let gap = cfg.base_gap();
    let b = bodies(cfg, gap)?;
    let kappa = cfg.numerics.kappa.expect("validated");
    let t = waves::tmatrix_from_surface(&b[0], &media(cfg)?, kappa, cfg.numerics.l_max)
        .context(|| format!("tmatrix at kappa {kappa}"))?;
    let mut r = ResultRecord::new(gap, cfg.thermal.temperature);
    r.kappa = Some(kappa);
    r.l_max = Some(t.l_max);
    r.unknowns = Some(unknowns(&b[..1]));
    for (i, a) in t.modes.iter().enumerate() {
        for (j, c) in t.modes.iter().enumerate() {
            let v = t.data[(i, j)];
            r.tmatrix.push(TEntry { p: pol(a.p), l: a.l, m: a.m, p2: pol(c.p), l2: c.l, m2: c.m, re: v.re, im: v.im });
        }
    }
    Ok(r)
}

/// One record per sweep point (or one for `tmatrix`).
pub fn run(cfg: &RunConfig) -> Result<Vec<ResultRecord>, CliError> {
    let points = match cfg.command {
        Command::Tmatrix => vec![cfg.base_gap()],
        _ => cfg.sweep_points(),
    };
    let mut out = Vec::with_capacity(points.len());
    for gap in points {
        let start = Instant::now();
        let mut r = match cfg.command {
            Command::Lifshitz => lifshitz_point(cfg, gap)?,
            Command::BemEnergy => bem_energy_point(cfg, gap)?,
            Command::Force => force_point(cfg, gap)?,
            Command::SphereSphere => sphere_sphere_point(cfg, gap)?,
            Command::Tmatrix => tmatrix_point(cfg)?,
        };
        if !r.finite() {
            return Err(CliError::Numeric {
                context: format!("result at gap {gap}"),
                source: casimir::Error::Accuracy("non-finite output".into()),
            });
        }
        r.wall_clock = start.elapsed().as_secs_f64();
        out.push(r);
    }
    Ok(out)
}
