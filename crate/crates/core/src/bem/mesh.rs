//! Closed triangulated surfaces with RWG edge bookkeeping.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::vec3::{add, cross, dot, mat_vec, norm, normalize, scale, sub, Mat3, Vec3};

/// Flat triangular panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub centroid: Vec3,
    pub area: f64,
    pub normal: Vec3,
    pub t1: Vec3,
    pub t2: Vec3,
}

/// Interior edge shared by two panels. `tri[k]` is a panel and `local[k]`
/// the index of its vertex opposite the edge; the basis function is
/// +ℓ/(2A)(x - v) on `tri[0]` and -ℓ/(2A)(x - v) on `tri[1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tri: [usize; 2],
    pub local: [usize; 2],
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BodyMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub panels: Vec<Panel>,
    pub edges: Vec<Edge>,
    /// Per panel and local vertex: (edge id, sign).
    pub tri_edges: Vec<[(usize, f64); 3]>,
    pub material_index: usize,
    pub center: Vec3,
}

impl BodyMesh {
    /// Builds panels and edges and checks the surface is closed, consistently
    /// oriented with outward normals, and free of duplicate panels.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>, material_index: usize, center: Vec3) -> Result<Self> {
        if triangles.len() < 4 {
            return Err(Error::Geometry("a closed surface needs at least 4 panels".into()));
        }
        let mut panels = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(Error::Geometry(format!("panel {t} references missing vertex {v}")));
                }
            }
            panels.push(make_panel(&vertices, tri).ok_or_else(|| {
                Error::Geometry(format!("panel {t} is degenerate"))
            })?);
        }

        // directed edge (a, b) -> (panel, opposite local vertex)
        let mut directed: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                if directed.insert((a, b), (t, i)).is_some() {
                    return Err(Error::Geometry(format!(
                        "edge ({a}, {b}) appears twice with the same orientation (panel {t})"
                    )));
                }
            }
        }
        let mut edges = Vec::new();
        let mut tri_edges = vec![[(usize::MAX, 0.0); 3]; triangles.len()];
        let mut keys: Vec<_> = directed.keys().copied().filter(|&(a, b)| a < b).collect();
        keys.sort_unstable();
        for (a, b) in keys {
            let (t0, i0) = directed[&(a, b)];
            let (t1, i1) = *directed.get(&(b, a)).ok_or_else(|| {
                Error::Geometry(format!("edge ({a}, {b}) is on the boundary; surface is not closed"))
            })?;
            let e = edges.len();
            edges.push(Edge {
                tri: [t0, t1],
                local: [i0, i1],
                length: norm(sub(vertices[a], vertices[b])),
            });
            tri_edges[t0][i0] = (e, 1.0);
            tri_edges[t1][i1] = (e, -1.0);
        }
        if let Some(&(a, b)) = directed.keys().find(|&&(a, b)| a > b && !directed.contains_key(&(b, a))) {
            return Err(Error::Geometry(format!("edge ({b}, {a}) is on the boundary; surface is not closed")));
        }

        let mesh = BodyMesh { vertices, triangles, panels, edges, tri_edges, material_index, center };
        mesh.check_closed()?;
        if mesh.volume() <= 0.0 {
            return Err(Error::Geometry("panel normals point inward (negative enclosed volume)".into()));
        }
        let mut cents: Vec<[u64; 3]> = mesh
            .panels
            .iter()
            .map(|p| p.centroid.map(|c| (c * 1e12).round() as i64 as u64))
            .collect();
        cents.sort_unstable();
        if cents.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Geometry("duplicate panel centroids".into()));
        }
        Ok(mesh)
    }

    pub fn n_panels(&self) -> usize {
        self.panels.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn area(&self) -> f64 {
        self.panels.iter().map(|p| p.area).sum()
    }

    pub fn volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| dot(self.vertices[t[0]], cross(self.vertices[t[1]], self.vertices[t[2]])) / 6.0)
            .sum()
    }

    /// |Σ n_k A_k| / Σ A_k.
    pub fn closure_defect(&self) -> f64 {
        let mut s = [0.0; 3];
        for p in &self.panels {
            s = add(s, scale(p.normal, p.area));
        }
        norm(s) / self.area()
    }

    fn check_closed(&self) -> Result<()> {
        let d = self.closure_defect();
        if d > 1e-6 {
            return Err(Error::Geometry(format!("surface is not closed: |Σ n A|/A = {d:e}")));
        }
        Ok(())
    }

    /// Largest panel diameter, estimated as 2√A.
    pub fn panel_diameter(&self) -> f64 {
        2.0 * self.panels.iter().map(|p| p.area).fold(0.0, f64::max).sqrt()
    }

    pub fn tri_vertices(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Midpoint of an edge.
    pub fn edge_midpoint(&self, e: usize) -> Vec3 {
        let ed = &self.edges[e];
        let tri = self.triangles[ed.tri[0]];
        let i = ed.local[0];
        scale(add(self.vertices[tri[(i + 1) % 3]], self.vertices[tri[(i + 2) % 3]]), 0.5)
    }

    /// Area attributed to an edge: a third of each adjacent panel.
    pub fn edge_area(&self, e: usize) -> f64 {
        let ed = &self.edges[e];
        (self.panels[ed.tri[0]].area + self.panels[ed.tri[1]].area) / 3.0
    }

    pub fn translated(&self, d: Vec3) -> BodyMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            *v = add(*v, d);
        }
        for p in &mut m.panels {
            p.centroid = add(p.centroid, d);
        }
        m.center = add(m.center, d);
        m
    }

    /// Rotates the body about the origin.
    pub fn rotated(&self, r: &Mat3) -> BodyMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            *v = mat_vec(r, *v);
        }
        for (p, tri) in m.panels.iter_mut().zip(&m.triangles) {
            *p = make_panel(&m.vertices, tri).expect("rotation keeps panels regular");
        }
        m.center = mat_vec(r, m.center);
        m
    }

    pub fn with_material(mut self, material_index: usize) -> BodyMesh {
        self.material_index = material_index;
        self
    }

    /// Winding-number test: is `x` inside the closed surface?
    pub fn contains(&self, x: Vec3) -> bool {
        let mut omega = 0.0;
        for t in 0..self.n_panels() {
            let [a, b, c] = self.tri_vertices(t).map(|v| sub(v, x));
            let (la, lb, lc) = (norm(a), norm(b), norm(c));
            let num = dot(a, cross(b, c));
            let den = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
            omega += 2.0 * num.atan2(den);
        }
        omega > 2.0 * PI
    }

    /// Smallest centroid distance to another mesh.
    pub fn min_distance(&self, other: &BodyMesh) -> f64 {
        let mut d = f64::INFINITY;
        for p in &self.panels {
            for q in &other.panels {
                d = d.min(norm(sub(p.centroid, q.centroid)));
            }
        }
        d
    }
}

fn make_panel(v: &[Vec3], tri: &[usize; 3]) -> Option<Panel> {
    let (a, b, c) = (v[tri[0]], v[tri[1]], v[tri[2]]);
    let n2 = cross(sub(b, a), sub(c, a));
    let area = 0.5 * norm(n2);
    let edge = norm(sub(b, a));
    if !(area > 0.0) || !(edge > 0.0) {
        return None;
    }
    let normal = normalize(n2);
    let t1 = normalize(sub(b, a));
    let t2 = cross(normal, t1);
    let centroid = scale(add(add(a, b), c), 1.0 / 3.0);
    Some(Panel { centroid, area, normal, t1, t2 })
}

/// Icosphere of `refinement` subdivisions (20·4^refinement panels). The
/// vertex radius is scaled so the enclosed volume equals 4πR³/3.
pub fn make_sphere_mesh(radius: f64, refinement: usize) -> Result<BodyMesh> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("sphere radius must be positive, got {radius}")));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|&v| normalize(v))
    .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..refinement {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |i: usize, j: usize, verts: &mut Vec<Vec3>| -> usize {
            *cache.entry((i.min(j), i.max(j))).or_insert_with(|| {
                verts.push(normalize(add(verts[i], verts[j])));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for &[a, b, c] in &tris {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let unit = BodyMesh::new(verts.clone(), tris.clone(), 0, [0.0; 3])?;
    let s = radius * (4.0 * PI / 3.0 / unit.volume()).cbrt();
    BodyMesh::new(verts.iter().map(|&v| scale(v, s)).collect(), tris, 0, [0.0; 3])
}

/// Long-side divisions of the plate mesh at a refinement level.
pub fn plate_divisions(refinement: usize) -> usize {
    (4.0 * 1.5f64.powi(refinement as i32 - 1)).round() as usize
}

/// Square box `side × side × thickness` centred at the origin, thickness
/// along z. The faces are split into right triangles on a uniform grid.
pub fn make_plate_mesh(side: f64, thickness: f64, refinement: usize) -> Result<BodyMesh> {
    if !(side > 0.0 && thickness > 0.0 && side.is_finite() && thickness.is_finite()) {
        return Err(Error::Domain(format!(
            "plate dimensions must be positive, got side {side}, thickness {thickness}"
        )));
    }
    let n = plate_divisions(refinement);
    let m = ((n as f64 * thickness / side).ceil() as usize).max(1);
    make_box_mesh([side, side, thickness], [n, n, m])
}

/// Axis-aligned box centred at the origin with `div[k]` grid divisions
/// along axis k.
pub fn make_box_mesh(size: Vec3, div: [usize; 3]) -> Result<BodyMesh> {
    if div.contains(&0) {
        return Err(Error::Domain("box divisions must be positive".into()));
    }
    let mut index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut verts = Vec::new();
    let mut vid = |g: [usize; 3], verts: &mut Vec<Vec3>| -> usize {
        *index.entry(g).or_insert_with(|| {
            verts.push(std::array::from_fn(|k| size[k] * (g[k] as f64 / div[k] as f64 - 0.5)));
            verts.len() - 1
        })
    };
    let mut tris = Vec::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in [0, div[axis]] {
            let outward = if side == 0 { -1.0 } else { 1.0 };
            for i in 0..div[u] {
                for j in 0..div[v] {
                    let g = |di: usize, dj: usize| {
                        let mut p = [0; 3];
                        p[axis] = side;
                        p[u] = i + di;
                        p[v] = j + dj;
                        p
                    };
                    let q = [
                        vid(g(0, 0), &mut verts),
                        vid(g(1, 0), &mut verts),
                        vid(g(1, 1), &mut verts),
                        vid(g(0, 1), &mut verts),
                    ];
                    // (u, v, axis) is right-handed, so q is counter-clockwise
                    // seen from +axis
                    if outward > 0.0 {
                        tris.push([q[0], q[1], q[2]]);
                        tris.push([q[0], q[2], q[3]]);
                    } else {
                        tris.push([q[0], q[2], q[1]]);
                        tris.push([q[0], q[3], q[2]]);
                    }
                }
            }
        }
    }
    BodyMesh::new(verts, tris, 0, [0.0; 3])
}

/// Reads a surface mesh: lines `v x y z` and `f i j k` (1-based, counter-
/// clockwise seen from outside); `#` starts a comment.
pub fn parse_mesh(text: &str, material_index: usize) -> Result<BodyMesh> {
    let mut verts = Vec::new();
    let mut tris = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let tag = it.next().unwrap_or("");
        let rest: Vec<&str> = it.collect();
        let err = |msg: String| Error::MeshParse { line: ln + 1, msg };
        match tag {
            "v" => {
                if rest.len() != 3 {
                    return Err(err(format!("expected 3 coordinates, found {}", rest.len())));
                }
                let mut p: Vec3 = [0.0; 3];
                for (k, s) in rest.iter().enumerate() {
                    p[k] = s.parse().map_err(|_| err(format!("bad number '{s}'")))?;
                    if !p[k].is_finite() {
                        return Err(err(format!("non-finite coordinate '{s}'")));
                    }
                }
                verts.push(p);
            }
            "f" => {
                if rest.len() != 3 {
                    return Err(err(format!("expected 3 vertex indices, found {}", rest.len())));
                }
                let mut t = [0usize; 3];
                for (k, s) in rest.iter().enumerate() {
                    let i: usize = s.parse().map_err(|_| err(format!("bad index '{s}'")))?;
                    if i == 0 || i > verts.len() {
                        return Err(err(format!("vertex index {i} out of range 1..={}", verts.len())));
                    }
                    t[k] = i - 1;
                }
                tris.push(t);
            }
            other => {
                return Err(err(format!(
                    "unknown record '{other}'; expected 'v' or 'f' (bare panel records carry no connectivity)"
                )))
            }
        }
    }
    let mut mesh = BodyMesh::new(verts, tris, material_index, [0.0; 3])?;
    let mut c = [0.0; 3];
    let a = mesh.area();
    for p in &mesh.panels {
        c = add(c, scale(p.centroid, p.area / a));
    }
    mesh.center = c;
    Ok(mesh)
}

pub fn read_mesh(path: &Path, material_index: usize) -> Result<BodyMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text, material_index)
}
