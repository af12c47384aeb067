//! Run configuration: a single JSON object.
//!
//! ```json
//! {
//!   "command": "lifshitz",
//!   "geometry": { "kind": "slab", "gap": 1.0 },
//!   "materials": { "outer": { "kind": "vacuum" },
//!                  "bodies": [ { "kind": "constant", "params": { "eps": 3.0 } } ] },
//!   "thermal": { "temperature": 0.0 },
//!   "sweep": [0.5, 1.0, 2.0]
//! }
//! ```

use std::path::{Path, PathBuf};

use casimir::materials::MaterialModel;
use casimir::matsubara::ThermalSpec;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Lifshitz,
    BemEnergy,
    SphereSphere,
    Tmatrix,
    Force,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub geometry: Geometry,
    pub materials: Materials,
    #[serde(default)]
    pub thermal: Thermal,
    #[serde(default)]
    pub numerics: Numerics,
    /// Gap values; empty means one run at the geometry's own gap.
    #[serde(default)]
    pub sweep: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Geometry {
    /// Two half-spaces.
    Slab { gap: f64 },
    /// Two icosphere meshes on the z axis; `gap` is surface to surface.
    Spheres {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius2: Option<f64>,
        gap: f64,
    },
    /// Two square plates stacked along z.
    Plates { side: f64, thickness: f64, gap: f64 },
    /// Mesh files; a sweep value is an extra z shift of the last body.
    Meshes { files: Vec<MeshFile> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub path: PathBuf,
    #[serde(default)]
    pub offset: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum MaterialSpec {
    Vacuum,
    Constant {
        eps: f64,
        #[serde(default = "one")]
        mu: f64,
    },
    Drude {
        wp2: f64,
        gamma: f64,
        #[serde(default = "one")]
        mu: f64,
    },
    Plasma {
        wp2: f64,
        #[serde(default = "one")]
        mu: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl MaterialSpec {
    pub fn model(&self) -> MaterialModel {
        match *self {
            MaterialSpec::Vacuum => MaterialModel::Vacuum,
            MaterialSpec::Constant { eps, mu } => MaterialModel::Constant { eps, mu },
            MaterialSpec::Drude { wp2, gamma, mu } => MaterialModel::Drude { wp2, gamma, mu },
            MaterialSpec::Plasma { wp2, mu } => MaterialModel::Plasma { wp2, mu },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Materials {
    #[serde(default = "vacuum")]
    pub outer: MaterialSpec,
    /// One entry shared by every body, or one per body.
    pub bodies: Vec<MaterialSpec>,
}

fn vacuum() -> MaterialSpec {
    MaterialSpec::Vacuum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thermal {
    /// 0 selects the zero-temperature integral.
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_rel_tol() -> f64 {
    1e-6
}

fn default_n_max() -> usize {
    10_000
}

impl Default for Thermal {
    fn default() -> Self {
        Thermal { temperature: 0.0, rel_tol: default_rel_tol(), n_max: default_n_max() }
    }
}

impl Thermal {
    pub fn spec(&self) -> ThermalSpec {
        let s = if self.temperature == 0.0 { ThermalSpec::zero() } else { ThermalSpec::finite(self.temperature) };
        s.with_tol(self.rel_tol).with_n_max(self.n_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Repr {
    Surface,
    Hamiltonian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    /// Mesh refinement level for generated meshes.
    #[serde(default = "default_refinement")]
    pub refinement: usize,
    /// Starting (or fixed, for `tmatrix`) multipole order.
    #[serde(default = "default_l_max")]
    pub l_max: usize,
    /// Largest multipole order the adaptive two-sphere sum may reach.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_cap: Option<usize>,
    /// Relative change of the last multipole accepted as converged.
    #[serde(default = "default_multipole_tol")]
    pub multipole_tol: f64,
    #[serde(default = "default_repr")]
    pub representation: Repr,
    /// Wavenumber for `tmatrix`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Body the `force` command acts on.
    #[serde(default = "default_body")]
    pub body: usize,
}

fn default_refinement() -> usize {
    1
}
fn default_l_max() -> usize {
    4
}
fn default_multipole_tol() -> f64 {
    1e-4
}
fn default_repr() -> Repr {
    Repr::Surface
}
fn default_body() -> usize {
    1
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            refinement: default_refinement(),
            l_max: default_l_max(),
            l_cap: None,
            multipole_tol: default_multipole_tol(),
            representation: default_repr(),
            kappa: None,
            body: default_body(),
        }
    }
}

const MAX_REFINEMENT: usize = 5;

fn field(path: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Config { path: path.into(), msg: msg.into() }
}

impl RunConfig {
    /// Parses and validates; relative mesh paths are resolved against
    /// `base`. `command` fills in a missing "command" field and must agree
    /// with one that is present.
    pub fn from_json(text: &str, base: &Path, command: Option<Command>) -> Result<RunConfig, CliError> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| field("", format!("invalid JSON: {e}")))?;
        if let (Some(c), Some(obj)) = (command, value.as_object_mut()) {
            let given = serde_json::to_value(c).expect("command serializes");
            match obj.get("command") {
                None => {
                    obj.insert("command".into(), given);
                }
                Some(v) if *v != given => {
                    return Err(field("command", format!("config says {v}, command line says {given}")));
                }
                Some(_) => {}
            }
        }
        let mut cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            field(if path == "." { String::new() } else { path }, e.into_inner().to_string())
        })?;
        if let Geometry::Meshes { files } = &mut cfg.geometry {
            for f in files.iter_mut() {
                if f.path.is_relative() {
                    f.path = base.join(&f.path);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path, command: Option<Command>) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| field("--config", format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text, path.parent().unwrap_or(Path::new(".")), command)
    }

    pub fn n_bodies(&self) -> usize {
        match &self.geometry {
            Geometry::Slab { .. } => 2,
            Geometry::Spheres { .. } | Geometry::Plates { .. } => 2,
            Geometry::Meshes { files } => files.len(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |path: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(field(path, format!("must be positive and finite, got {v}")))
            }
        };

        for (i, &v) in self.sweep.iter().enumerate() {
            positive(&format!("sweep[{i}]"), v)?;
            if i > 0 && v <= self.sweep[i - 1] {
                return Err(field(format!("sweep[{i}]"), "sweep values must be strictly increasing"));
            }
        }

        match &self.geometry {
            Geometry::Slab { gap } => positive("geometry.gap", *gap)?,
            Geometry::Spheres { radius, radius2, gap } => {
                positive("geometry.radius", *radius)?;
                if let Some(r) = radius2 {
                    positive("geometry.radius2", *r)?;
                }
                positive("geometry.gap", *gap)?;
            }
            Geometry::Plates { side, thickness, gap } => {
                positive("geometry.side", *side)?;
                positive("geometry.thickness", *thickness)?;
                positive("geometry.gap", *gap)?;
            }
            Geometry::Meshes { files } => {
                if files.is_empty() {
                    return Err(field("geometry.files", "at least one mesh file is required"));
                }
                for (i, f) in files.iter().enumerate() {
                    if !f.path.is_file() {
                        return Err(field(
                            format!("geometry.files[{i}].path"),
                            format!("no such file: {}", f.path.display()),
                        ));
                    }
                    if !f.offset.iter().all(|x| x.is_finite()) {
                        return Err(field(format!("geometry.files[{i}].offset"), "must be finite"));
                    }
                }
            }
        }

        let slab = matches!(self.geometry, Geometry::Slab { .. });
        match self.command {
            Command::Lifshitz if !slab => {
                return Err(field("geometry.kind", "lifshitz needs a slab geometry"));
            }
            Command::BemEnergy | Command::Force | Command::SphereSphere | Command::Tmatrix if slab => {
                return Err(field("geometry.kind", "slab geometry only works with the lifshitz command"));
            }
            _ => {}
        }
        let nb = self.n_bodies();
        if self.command == Command::SphereSphere && nb != 2 {
            return Err(field("geometry.files", format!("sphere-sphere needs two bodies, got {nb}")));
        }
        if self.command == Command::Force && self.numerics.body >= nb {
            return Err(field("numerics.body", format!("body index {} out of range for {nb} bodies", self.numerics.body)));
        }
        if self.command == Command::Tmatrix {
            if !self.sweep.is_empty() {
                return Err(field("sweep", "tmatrix takes no sweep; set numerics.kappa"));
            }
            match self.numerics.kappa {
                Some(k) => positive("numerics.kappa", k)?,
                None => return Err(field("numerics.kappa", "tmatrix needs a wavenumber")),
            }
        }

        let m = &self.materials;
        if m.bodies.is_empty() || (m.bodies.len() != 1 && m.bodies.len() != nb) {
            return Err(field(
                "materials.bodies",
                format!("give one shared material or one per body ({nb}), got {}", m.bodies.len()),
            ));
        }
        m.outer.model().validate().map_err(|e| field("materials.outer", e.to_string()))?;
        for (i, b) in m.bodies.iter().enumerate() {
            b.model().validate().map_err(|e| field(format!("materials.bodies[{i}]"), e.to_string()))?;
        }
        if matches!(self.command, Command::SphereSphere | Command::Tmatrix) && m.outer != MaterialSpec::Vacuum {
            return Err(field("materials.outer", "partial waves need a vacuum outer medium"));
        }

        self.thermal.spec().validate().map_err(|e| field("thermal", e.to_string()))?;
        if !(self.thermal.temperature >= 0.0) {
            return Err(field("thermal.temperature", "must be nonnegative"));
        }

        let n = &self.numerics;
        if n.refinement > MAX_REFINEMENT {
            return Err(field("numerics.refinement", format!("at most {MAX_REFINEMENT}, got {}", n.refinement)));
        }
        if n.l_max < 2 && self.command == Command::SphereSphere {
            return Err(field("numerics.l_max", "sphere-sphere needs l_max >= 2"));
        }
        if n.l_max < 1 {
            return Err(field("numerics.l_max", "must be >= 1"));
        }
        if let Some(c) = n.l_cap {
            if c < n.l_max {
                return Err(field("numerics.l_cap", format!("must be >= l_max ({})", n.l_max)));
            }
        }
        if !(n.multipole_tol > 0.0 && n.multipole_tol < 1.0) {
            return Err(field("numerics.multipole_tol", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// The geometry's own gap, used when the sweep is empty. Mesh files
    /// have none; their single run uses a zero shift.
    pub fn base_gap(&self) -> f64 {
        match self.geometry {
            Geometry::Slab { gap } | Geometry::Spheres { gap, .. } | Geometry::Plates { gap, .. } => gap,
            Geometry::Meshes { .. } => 0.0,
        }
    }

    pub fn sweep_points(&self) -> Vec<f64> {
        if self.sweep.is_empty() {
            vec![self.base_gap()]
        } else {
            self.sweep.clone()
        }
    }
}
