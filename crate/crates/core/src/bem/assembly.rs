//! Galerkin assembly of the surface operators on RWG edge functions.
//!
//! Per homogeneous medium (ε, μ) and wavenumber k = κ√(εμ) three edge
//! matrices are formed:
//!
//! * V_ef = ⟨f_e, g f_f⟩,
//! * Dm_ef = ⟨∇·f_e, g ∇·f_f⟩,
//! * X_ef = ⟨f_e, ∇g × f_f⟩.
//!
//! With unknowns ordered (E-currents, H-currents) the medium contributes
//!
//! ```text
//! [ -Dm/ε - μκ²V     -κX        ]
//! [  κX              -Dm/μ - εκ²V ]
//! ```
//!
//! which is the tangential Galerkin form of (G^EE, G^EH; G^HE, G^HH).
//! M̂_r sums the outer medium and medium r; inter-body blocks carry the outer
//! medium only.

use faer::Mat;
use rayon::prelude::*;

use super::integrals::{near_pair, panel_points, regular_pair, regular_pair_grad, Local, Points};
use super::mesh::BodyMesh;
use crate::error::{Error, Result};
use crate::linalg::check_finite;
use crate::materials::{response, MediumAssignment, Response};
use crate::quad::TriangleRule;
use crate::vec3::{add, norm, scale, sub, Vec3};

/// Near-pair threshold in units of the largest panel diameter.
pub const NEAR_FACTOR: f64 = 2.0;

const CHUNK: usize = 64;

/// Edge-basis matrices of one medium.
#[derive(Debug, Clone)]
pub struct EdgeOps {
    pub v: Mat<f64>,
    pub x: Mat<f64>,
    pub dm: Mat<f64>,
}

impl EdgeOps {
    fn zeros(n: usize, m: usize) -> Self {
        EdgeOps { v: Mat::zeros(n, m), x: Mat::zeros(n, m), dm: Mat::zeros(n, m) }
    }

    fn symmetrize(&mut self) {
        for a in [&mut self.v, &mut self.x, &mut self.dm] {
            let n = a.nrows();
            for j in 0..n {
                for i in 0..j {
                    let s = 0.5 * (a[(i, j)] + a[(j, i)]);
                    a[(i, j)] = s;
                    a[(j, i)] = s;
                }
            }
        }
    }

    pub fn transpose(&self) -> EdgeOps {
        EdgeOps {
            v: self.v.transpose().to_owned(),
            x: self.x.transpose().to_owned(),
            dm: self.dm.transpose().to_owned(),
        }
    }
}

/// Per-panel data used by the integrators.
pub(crate) struct Prepared {
    pub verts: Vec<[Vec3; 3]>,
    pub normals: Vec<Vec3>,
    pub centroids: Vec<Vec3>,
    pub p3: Vec<Points>,
    pub p7: Vec<Points>,
    /// 7-point rule on 4 and 16 congruent sub-panels
    pub p28: Vec<Points>,
    pub p112: Vec<Points>,
    pub sizes: Vec<f64>,
    /// (edge, σℓ/(2A), σℓ/A) per local vertex
    pub basis: Vec<[(usize, f64, f64); 3]>,
    pub n_edges: usize,
    pub diameter: f64,
}

impl Prepared {
    pub fn new(mesh: &BodyMesh) -> Self {
        let r3 = TriangleRule::strang3();
        let r7 = TriangleRule::dunavant7();
        let nt = mesh.n_panels();
        let verts: Vec<[Vec3; 3]> = (0..nt).map(|t| mesh.tri_vertices(t)).collect();
        let p3 = (0..nt).map(|t| panel_points(&verts[t], mesh.panels[t].area, &r3)).collect();
        let p7 = (0..nt).map(|t| panel_points(&verts[t], mesh.panels[t].area, &r7)).collect();
        let p28 = (0..nt).map(|t| subdivided_points(&verts[t], mesh.panels[t].area, &r7, 1)).collect();
        let p112 = (0..nt).map(|t| subdivided_points(&verts[t], mesh.panels[t].area, &r7, 2)).collect();
        let basis = (0..nt)
            .map(|t| {
                let a = mesh.panels[t].area;
                std::array::from_fn(|i| {
                    let (e, s) = mesh.tri_edges[t][i];
                    let l = mesh.edges[e].length;
                    (e, s * l / (2.0 * a), s * l / a)
                })
            })
            .collect();
        Prepared {
            verts,
            normals: mesh.panels.iter().map(|p| p.normal).collect(),
            centroids: mesh.panels.iter().map(|p| p.centroid).collect(),
            p3,
            p7,
            p28,
            p112,
            sizes: mesh.panels.iter().map(|p| 2.0 * p.area.sqrt()).collect(),
            basis,
            n_edges: mesh.n_edges(),
            diameter: mesh.panel_diameter(),
        }
    }

    fn n_panels(&self) -> usize {
        self.verts.len()
    }

    fn level(&self, t: usize, l: usize) -> &[(Vec3, f64)] {
        match l {
            0 => &self.p7[t],
            1 => &self.p28[t],
            _ => &self.p112[t],
        }
    }
}

fn subdivided_points(tri: &[Vec3; 3], area: f64, rule: &TriangleRule, levels: usize) -> Points {
    let mut tris = vec![*tri];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(4 * tris.len());
        for t in &tris {
            let mid = |a: Vec3, b: Vec3| scale(add(a, b), 0.5);
            let (ab, bc, ca) = (mid(t[0], t[1]), mid(t[1], t[2]), mid(t[2], t[0]));
            next.extend([[t[0], ab, ca], [t[1], bc, ab], [t[2], ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let a = area / tris.len() as f64;
    tris.iter().flat_map(|t| panel_points(t, a, rule)).collect()
}

/// Subdivision levels of the inter-body product rules, one per panel pair
/// (row-major over the panels of the lower-indexed body). Finite
/// differences reuse the levels of the undisplaced configuration so the
/// discrete energy stays smooth in the displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureLevels {
    pub pairs: Vec<((usize, usize), Vec<u8>)>,
}

impl QuadratureLevels {
    pub fn new(bodies: &[BodyMesh]) -> Self {
        let prepared: Vec<Prepared> = bodies.iter().map(Prepared::new).collect();
        Self::from_prepared(&prepared)
    }

    pub(crate) fn from_prepared(p: &[Prepared]) -> Self {
        let mut pairs = Vec::new();
        for r in 0..p.len() {
            for s in r + 1..p.len() {
                let mut l = Vec::with_capacity(p[r].n_panels() * p[s].n_panels());
                for a in 0..p[r].n_panels() {
                    for b in 0..p[s].n_panels() {
                        l.push(pair_level(&p[r], a, &p[s], b) as u8);
                    }
                }
                pairs.push(((r, s), l));
            }
        }
        QuadratureLevels { pairs }
    }

    fn get(&self, r: usize, s: usize) -> Option<&[u8]> {
        self.pairs.iter().find(|(k, _)| *k == (r, s)).map(|(_, v)| v.as_slice())
    }
}

/// Subdivision level of the product rule for an inter-body panel pair.
fn pair_level(pa: &Prepared, a: usize, pb: &Prepared, b: usize) -> usize {
    let rho = norm(sub(pa.centroids[a], pb.centroids[b])) / pa.sizes[a].max(pb.sizes[b]);
    if rho >= 2.0 {
        0
    } else if rho >= 1.0 {
        1
    } else {
        2
    }
}

fn scatter(ops: &mut EdgeOps, ba: &[(usize, f64, f64); 3], bb: &[(usize, f64, f64); 3], loc: &Local) {
    for i in 0..3 {
        let (e, ci, di) = ba[i];
        for j in 0..3 {
            let (f, cj, dj) = bb[j];
            ops.v[(e, f)] += ci * cj * loc.v[i][j];
            ops.x[(e, f)] += ci * cj * loc.x[i][j];
            ops.dm[(e, f)] += di * dj * loc.s;
        }
    }
}

/// Edge matrices of a closed surface against itself, one set per wavenumber.
pub fn self_ops(mesh: &BodyMesh, ks: &[f64]) -> Vec<EdgeOps> {
    self_ops_prepared(&Prepared::new(mesh), ks)
}

/// Calls `f(a, b, locals)` for every panel pair of one surface, the locals
/// holding one entry per wavenumber. Rows are computed in parallel chunks.
fn visit_self_pairs(p: &Prepared, ks: &[f64], mut f: impl FnMut(usize, usize, &[Local])) {
    let nt = p.n_panels();
    let near = NEAR_FACTOR * p.diameter;
    let rows: Vec<usize> = (0..nt).collect();
    for chunk in rows.chunks(CHUNK) {
        let locals: Vec<Vec<Vec<Local>>> = chunk
            .par_iter()
            .map(|&a| {
                (0..nt)
                    .map(|b| {
                        if norm(sub(p.centroids[a], p.centroids[b])) < near {
                            near_pair(&p.verts[a], &p.p7[a], &p.verts[b], p.normals[b], &p.p7[b], ks, a == b)
                        } else {
                            ks.iter()
                                .map(|&k| regular_pair(&p.verts[a], &p.p3[a], &p.verts[b], &p.p3[b], k))
                                .collect()
                        }
                    })
                    .collect()
            })
            .collect();
        for (&a, row) in chunk.iter().zip(&locals) {
            for (b, per_k) in row.iter().enumerate() {
                f(a, b, per_k);
            }
        }
    }
}

pub(crate) fn self_ops_prepared(p: &Prepared, ks: &[f64]) -> Vec<EdgeOps> {
    let ne = p.n_edges;
    let mut out: Vec<EdgeOps> = ks.iter().map(|_| EdgeOps::zeros(ne, ne)).collect();
    visit_self_pairs(p, ks, |a, b, per_k| {
        for (ops, loc) in out.iter_mut().zip(per_k) {
            scatter(ops, &p.basis[a], &p.basis[b], loc);
        }
    });
    for o in &mut out {
        o.symmetrize();
    }
    out
}

/// Surface-form M̂_r of one body written straight into the 2n × 2n matrix,
/// without keeping per-medium edge matrices. Equals
/// `System::self_block(r, Representation::Surface)` up to rounding.
pub(crate) fn self_kernel_prepared(p: &Prepared, outer: Response, inner: Response, kappa: f64) -> Mat<f64> {
    let ne = p.n_edges;
    let k0 = wavenumber(outer, kappa);
    let kr = wavenumber(inner, kappa);
    let (ks, which): (Vec<f64>, [usize; 2]) = if k0 == kr { (vec![k0], [0, 0]) } else { (vec![k0, kr], [0, 1]) };
    let k2 = kappa * kappa;
    let mut m = Mat::<f64>::zeros(2 * ne, 2 * ne);
    visit_self_pairs(p, &ks, |a, b, per_k| {
        for (med, &w) in [outer, inner].iter().zip(&which) {
            let loc = &per_k[w];
            for i in 0..3 {
                let (e, ci, di) = p.basis[a][i];
                for j in 0..3 {
                    let (f, cj, dj) = p.basis[b][j];
                    let v = ci * cj * loc.v[i][j];
                    let x = ci * cj * loc.x[i][j];
                    let dm = di * dj * loc.s;
                    m[(e, f)] += -dm / med.eps - med.mu * k2 * v;
                    m[(e, ne + f)] += -kappa * x;
                    m[(ne + e, f)] += kappa * x;
                    m[(ne + e, ne + f)] += -dm / med.mu - med.eps * k2 * v;
                }
            }
        }
    });
    for j in 0..ne {
        for i in 0..j {
            for (r, c) in [(0, 0), (ne, ne)] {
                let s = 0.5 * (m[(r + i, c + j)] + m[(r + j, c + i)]);
                m[(r + i, c + j)] = s;
                m[(r + j, c + i)] = s;
            }
        }
    }
    for j in 0..ne {
        for i in 0..=j {
            let s = 0.5 * (m[(i, ne + j)] + m[(j, ne + i)]);
            m[(i, ne + j)] = s;
            m[(j, ne + i)] = s;
            m[(ne + i, j)] = -s;
            m[(ne + j, i)] = -s;
        }
    }
    m
}

/// Edge matrices between two disjoint bodies (rows on `a`). Panel pairs use
/// a 7×7 point product rule, on subdivided panels when the pair is closer
/// than two panel sizes.
pub fn pair_ops(a: &BodyMesh, b: &BodyMesh, k: f64) -> Result<EdgeOps> {
    check_disjoint(a, b)?;
    let p = [Prepared::new(a), Prepared::new(b)];
    let levels = QuadratureLevels::from_prepared(&p);
    Ok(pair_ops_prepared(&p[0], &p[1], k, levels.get(0, 1).expect("pair present")))
}

pub(crate) fn pair_ops_prepared(pa: &Prepared, pb: &Prepared, k: f64, levels: &[u8]) -> EdgeOps {
    let nb = pb.n_panels();
    let mut ops = EdgeOps::zeros(pa.n_edges, pb.n_edges);
    let rows: Vec<usize> = (0..pa.n_panels()).collect();
    for chunk in rows.chunks(CHUNK) {
        let locals: Vec<Vec<Local>> = chunk
            .par_iter()
            .map(|&a| {
                (0..pb.n_panels())
                    .map(|b| {
                        let l = levels[a * nb + b] as usize;
                        regular_pair(&pa.verts[a], pa.level(a, l), &pb.verts[b], pb.level(b, l), k)
                    })
                    .collect()
            })
            .collect();
        for (&a, row) in chunk.iter().zip(&locals) {
            for (b, loc) in row.iter().enumerate() {
                scatter(&mut ops, &pa.basis[a], &pb.basis[b], loc);
            }
        }
    }
    ops
}

/// Derivatives of [`pair_ops`] under translation of body `a` along x, y, z.
/// `levels` = None marks the self-interaction diagnostic: plain 7×7 rule,
/// coincident panels skipped.
pub(crate) fn pair_grad_ops_prepared(pa: &Prepared, pb: &Prepared, k: f64, levels: Option<&[u8]>) -> [EdgeOps; 3] {
    let nb = pb.n_panels();
    let skip_same = levels.is_none();
    let mut ops: [EdgeOps; 3] = std::array::from_fn(|_| EdgeOps::zeros(pa.n_edges, pb.n_edges));
    let rows: Vec<usize> = (0..pa.n_panels()).collect();
    for chunk in rows.chunks(CHUNK) {
        let locals: Vec<Vec<Option<[Local; 3]>>> = chunk
            .par_iter()
            .map(|&a| {
                (0..pb.n_panels())
                    .map(|b| {
                        if skip_same && a == b {
                            None
                        } else {
                            let l = levels.map_or(0, |l| l[a * nb + b] as usize);
                            Some(regular_pair_grad(&pa.verts[a], pa.level(a, l), &pb.verts[b], pb.level(b, l), k))
                        }
                    })
                    .collect()
            })
            .collect();
        for (&a, row) in chunk.iter().zip(&locals) {
            for (b, loc) in row.iter().enumerate() {
                if let Some(loc) = loc {
                    for t in 0..3 {
                        scatter(&mut ops[t], &pa.basis[a], &pb.basis[b], &loc[t]);
                    }
                }
            }
        }
    }
    ops
}

/// Rejects bodies whose surfaces touch or where one contains panels of the
/// other.
pub fn check_disjoint(a: &BodyMesh, b: &BodyMesh) -> Result<()> {
    let d = a.min_distance(b);
    let h = a.panel_diameter().max(b.panel_diameter());
    if d <= 1e-3 * h {
        return Err(Error::Geometry(format!(
            "bodies touch: closest panel centroids {d:.3e} apart, panel diameter {h:.3e}"
        )));
    }
    for (x, y) in [(a, b), (b, a)] {
        if let Some(t) = x.panels.iter().position(|p| y.contains(p.centroid)) {
            return Err(Error::Geometry(format!("bodies overlap: panel {t} of one body lies inside the other")));
        }
    }
    Ok(())
}

/// Field representation of the discretized kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Surface operator M̂ on (E, H) currents.
    Surface,
    /// Hamiltonian kernel N̂ on (K, K′) with the 1/μ_r field scaling.
    Hamiltonian,
}

/// Unknown layout: body r owns rows `offsets[r] .. offsets[r] + 2·edges[r]`,
/// first its E (or K) edge currents, then its H (or K′) currents.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub offsets: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Layout {
    pub fn new(bodies: &[BodyMesh]) -> Self {
        let mut offsets = Vec::with_capacity(bodies.len());
        let mut edges = Vec::with_capacity(bodies.len());
        let mut o = 0;
        for b in bodies {
            offsets.push(o);
            edges.push(b.n_edges());
            o += 2 * b.n_edges();
        }
        Layout { offsets, edges }
    }

    pub fn dim(&self) -> usize {
        self.offsets.last().map_or(0, |&o| o + 2 * self.edges.last().copied().unwrap_or(0))
    }

    pub fn block(&self, r: usize) -> std::ops::Range<usize> {
        self.offsets[r]..self.offsets[r] + 2 * self.edges[r]
    }

    /// (body, component, edge) of a row; component 0 is E/K, 1 is H/K′.
    pub fn locate(&self, row: usize) -> (usize, usize, usize) {
        for r in 0..self.offsets.len() {
            let b = self.block(r);
            if b.contains(&row) {
                let i = row - b.start;
                return (r, i / self.edges[r], i % self.edges[r]);
            }
        }
        panic!("row {row} outside layout of dimension {}", self.dim());
    }
}

#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub mat: Mat<f64>,
    pub layout: Layout,
    pub repr: Representation,
}

/// Adds one medium's contribution to the block at (r0, c0), sized
/// 2n × 2m. `scale_r`, `scale_c` are κμ of the row and column bodies
/// (only used by the Hamiltonian form).
#[allow(clippy::too_many_arguments)]
pub(crate) fn add_medium(
    target: &mut Mat<f64>,
    r0: usize,
    c0: usize,
    ops: &EdgeOps,
    med: Response,
    kappa: f64,
    repr: Representation,
    scale_r: f64,
    scale_c: f64,
) {
    let (n, m) = (ops.v.nrows(), ops.v.ncols());
    let (eps, mu) = (med.eps, med.mu);
    let k2 = kappa * kappa;
    for j in 0..m {
        for i in 0..n {
            let (v, x, dm) = (ops.v[(i, j)], ops.x[(i, j)], ops.dm[(i, j)]);
            let ee = -dm / eps - mu * k2 * v;
            let hh = -dm / mu - eps * k2 * v;
            match repr {
                Representation::Surface => {
                    target[(r0 + i, c0 + j)] += ee;
                    target[(r0 + i, c0 + m + j)] += -kappa * x;
                    target[(r0 + n + i, c0 + j)] += kappa * x;
                    target[(r0 + n + i, c0 + m + j)] += hh;
                }
                Representation::Hamiltonian => {
                    target[(r0 + i, c0 + j)] += hh;
                    target[(r0 + i, c0 + m + j)] += kappa * x / scale_c;
                    target[(r0 + n + i, c0 + j)] += kappa * x / scale_r;
                    target[(r0 + n + i, c0 + m + j)] += -ee / (scale_r * scale_c);
                }
            }
        }
    }
}

/// Wavenumbers and responses of the outer medium and each body material
/// at imaginary frequency κ.
pub(crate) fn media_at(media: &MediumAssignment, bodies: &[BodyMesh], kappa: f64) -> Result<(Response, Vec<Response>)> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!("kappa must be > 0, got {kappa}")));
    }
    let outer = response(&media.outer, kappa)?;
    let mut inner = Vec::with_capacity(bodies.len());
    for (r, b) in bodies.iter().enumerate() {
        let model = media.bodies.get(b.material_index).ok_or_else(|| {
            Error::Domain(format!(
                "body {r} uses material {} but only {} are defined",
                b.material_index,
                media.bodies.len()
            ))
        })?;
        inner.push(response(model, kappa)?);
    }
    Ok((outer, inner))
}

fn wavenumber(m: Response, kappa: f64) -> f64 {
    kappa * (m.eps * m.mu).sqrt()
}

/// Self operators of one body: (outer-medium ops, inner-medium ops).
pub(crate) fn body_ops(p: &Prepared, outer: Response, inner: Response, kappa: f64) -> (EdgeOps, EdgeOps) {
    let k0 = wavenumber(outer, kappa);
    let kr = wavenumber(inner, kappa);
    if k0 == kr {
        let o = self_ops_prepared(p, &[k0]).pop().expect("one set");
        (o.clone(), o)
    } else {
        let mut o = self_ops_prepared(p, &[k0, kr]);
        let i = o.pop().expect("two sets");
        (o.pop().expect("two sets"), i)
    }
}

/// M̂_r = Π̂_r(Ĝ^{(r)} + Ĝ^{(0)})Π̂_r for one body.
pub fn assemble_mr(body: &BodyMesh, media: &MediumAssignment, kappa: f64) -> Result<KernelMatrix> {
    let bodies = std::slice::from_ref(body);
    let sys = System::assemble(bodies, media, kappa)?;
    sys.kernel(Representation::Surface)
}

/// Ĝ_rs^{(0)} coupling `a` (rows) to `b` (columns), (E, H) ordering.
pub fn assemble_grs(a: &BodyMesh, b: &BodyMesh, media: &MediumAssignment, kappa: f64) -> Result<Mat<f64>> {
    let (outer, _) = media_at(media, &[a.clone(), b.clone()], kappa)?;
    let ops = pair_ops(a, b, wavenumber(outer, kappa))?;
    let mut m = Mat::zeros(2 * a.n_edges(), 2 * b.n_edges());
    add_medium(&mut m, 0, 0, &ops, outer, kappa, Representation::Surface, 1.0, 1.0);
    check_finite(m.as_ref())?;
    Ok(m)
}

/// All edge operators of a configuration at one frequency.
pub struct System {
    pub layout: Layout,
    pub kappa: f64,
    pub outer: Response,
    pub inner: Vec<Response>,
    /// (outer, inner) self operators per body
    pub self_ops: Vec<(EdgeOps, EdgeOps)>,
    /// outer-medium coupling for r < s, rows on r
    pub pair_ops: Vec<((usize, usize), EdgeOps)>,
}

impl System {
    pub fn assemble(bodies: &[BodyMesh], media: &MediumAssignment, kappa: f64) -> Result<Self> {
        Self::assemble_with(bodies, media, kappa, None)
    }

    /// As [`System::assemble`], reusing given inter-body quadrature levels.
    pub fn assemble_with(
        bodies: &[BodyMesh],
        media: &MediumAssignment,
        kappa: f64,
        levels: Option<&QuadratureLevels>,
    ) -> Result<Self> {
        let (outer, inner) = media_at(media, bodies, kappa)?;
        for r in 0..bodies.len() {
            for s in r + 1..bodies.len() {
                check_disjoint(&bodies[r], &bodies[s])?;
            }
        }
        let prepared: Vec<Prepared> = bodies.iter().map(Prepared::new).collect();
        let self_ops = prepared
            .iter()
            .zip(&inner)
            .map(|(p, &m)| body_ops(p, outer, m, kappa))
            .collect();
        let k0 = wavenumber(outer, kappa);
        let own;
        let levels = match levels {
            Some(l) => l,
            None => {
                own = QuadratureLevels::from_prepared(&prepared);
                &own
            }
        };
        let mut pair_ops = Vec::new();
        for r in 0..bodies.len() {
            for s in r + 1..bodies.len() {
                let l = levels
                    .get(r, s)
                    .filter(|l| l.len() == prepared[r].n_panels() * prepared[s].n_panels())
                    .ok_or_else(|| Error::Domain(format!("quadrature levels do not match bodies {r}, {s}")))?;
                pair_ops.push(((r, s), pair_ops_prepared(&prepared[r], &prepared[s], k0, l)));
            }
        }
        Ok(System { layout: Layout::new(bodies), kappa, outer, inner, self_ops, pair_ops })
    }

    fn scale(&self, r: usize, repr: Representation) -> f64 {
        match repr {
            Representation::Surface => 1.0,
            Representation::Hamiltonian => self.kappa * self.inner[r].mu,
        }
    }

    /// Diagonal block of body r.
    pub fn self_block(&self, r: usize, repr: Representation) -> Mat<f64> {
        let n = 2 * self.layout.edges[r];
        let mut m = Mat::zeros(n, n);
        let s = self.scale(r, repr);
        let (o, i) = &self.self_ops[r];
        add_medium(&mut m, 0, 0, o, self.outer, self.kappa, repr, s, s);
        add_medium(&mut m, 0, 0, i, self.inner[r], self.kappa, repr, s, s);
        m
    }

    /// Full block matrix.
    pub fn kernel(&self, repr: Representation) -> Result<KernelMatrix> {
        let n = self.layout.dim();
        let mut m = Mat::zeros(n, n);
        for r in 0..self.layout.edges.len() {
            let b = self.self_block(r, repr);
            let o = self.layout.offsets[r];
            m.as_mut().submatrix_mut(o, o, b.nrows(), b.ncols()).copy_from(b.as_ref());
        }
        for ((r, s), ops) in &self.pair_ops {
            let (sr, ss) = (self.scale(*r, repr), self.scale(*s, repr));
            let (or, os) = (self.layout.offsets[*r], self.layout.offsets[*s]);
            add_medium(&mut m, or, os, ops, self.outer, self.kappa, repr, sr, ss);
            add_medium(&mut m, os, or, &ops.transpose(), self.outer, self.kappa, repr, ss, sr);
        }
        check_finite(m.as_ref()).map_err(|e| match e {
            Error::NonFinite { row, col } => {
                let (br, cr, er) = self.layout.locate(row);
                let (bc, cc, ec) = self.layout.locate(col);
                Error::Assembly(format!(
                    "non-finite kernel entry between body {br} component {cr} edge {er} and body {bc} component {cc} edge {ec}"
                ))
            }
            other => other,
        })?;
        Ok(KernelMatrix { mat: m, layout: self.layout.clone(), repr })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bem::make_sphere_mesh;
    use crate::materials::MaterialModel;

    #[test]
    fn streamed_self_kernel_matches_block() {
        let s = make_sphere_mesh(1.0, 1).unwrap();
        for model in [MaterialModel::magnetic(2.5, 1.4), MaterialModel::Vacuum] {
            let media = MediumAssignment::new(MaterialModel::Vacuum, vec![model]).unwrap();
            let sys = System::assemble(std::slice::from_ref(&s), &media, 0.8).unwrap();
            let a = sys.self_block(0, Representation::Surface);
            let b = self_kernel_prepared(&Prepared::new(&s), sys.outer, sys.inner[0], 0.8);
            let scale = crate::linalg::max_abs(a.as_ref());
            for j in 0..a.ncols() {
                for i in 0..a.nrows() {
                    assert!((a[(i, j)] - b[(i, j)]).abs() < 1e-13 * scale, "({i},{j})");
                }
            }
        }
    }
}
