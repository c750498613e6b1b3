//! Triangulations of the disk `Ω = B(r3)` aligned with the circles `r1` and `r2`.

mod build;
mod io;
mod metrics;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::MeshError;

pub use build::{build_disk_mesh, refine_uniform};
pub use io::{read_mesh, write_mesh};
pub use metrics::{mesh_metrics, validate, Diagnostics, MeshMetrics, Violation};

/// Radii of the data set `ω = B(r1)`, the target set `B = B(r2)` and the
/// computational domain `Ω = B(r3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub dim: usize,
}

impl Geometry {
    pub fn new(r1: f64, r2: f64, r3: f64, dim: usize) -> Result<Self, MeshError> {
        let g = Geometry { r1, r2, r3, dim };
        g.check()?;
        Ok(g)
    }

    /// Two-dimensional geometry, the only one that can be meshed.
    pub fn disk(r1: f64, r2: f64, r3: f64) -> Result<Self, MeshError> {
        Self::new(r1, r2, r3, 2)
    }

    pub fn check(&self) -> Result<(), MeshError> {
        let finite = self.r1.is_finite() && self.r2.is_finite() && self.r3.is_finite();
        if !finite || !(0.0 < self.r1) {
            return Err(MeshError::Geometry(format!("0 < r1 violated (r1 = {})", self.r1)));
        }
        if !(self.r1 < self.r2) {
            return Err(MeshError::Geometry("r1 < r2 violated".into()));
        }
        if !(self.r2 < self.r3) {
            return Err(MeshError::Geometry("r2 < r3 violated".into()));
        }
        if self.dim != 2 && self.dim != 3 {
            return Err(MeshError::Geometry(format!("dim must be 2 or 3 (got {})", self.dim)));
        }
        Ok(())
    }

    pub fn radii(&self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }

    /// Index (0, 1, 2) of the circle `x` lies on, if any.
    pub fn circle_of(&self, x: [f64; 2]) -> Option<usize> {
        let r = x[0].hypot(x[1]);
        let tol = 1e-10 * self.r3;
        self.radii().iter().position(|&c| (r - c).abs() <= tol)
    }
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry { r1: 0.25, r2: 0.5, r3: 1.0, dim: 2 }
    }
}

/// Element tag: the ring band an element was created in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    OmegaData,
    TargetAnnulus,
    OuterAnnulus,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::OmegaData, Region::TargetAnnulus, Region::OuterAnnulus];

    pub fn name(self) -> &'static str {
        match self {
            Region::OmegaData => "OMEGA_DATA",
            Region::TargetAnnulus => "TARGET_ANNULUS",
            Region::OuterAnnulus => "OUTER_ANNULUS",
        }
    }

    pub fn from_name(s: &str) -> Option<Region> {
        Region::ALL.into_iter().find(|r| r.name() == s)
    }

    fn bit(self) -> u8 {
        match self {
            Region::OmegaData => 1,
            Region::TargetAnnulus => 2,
            Region::OuterAnnulus => 4,
        }
    }
}

/// A set of region tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RegionSet(u8);

impl RegionSet {
    pub const EMPTY: RegionSet = RegionSet(0);
    /// The data set `ω`.
    pub const OMEGA: RegionSet = RegionSet(1);
    /// The target set `B = ω ∪ (r1 < |x| < r2)`.
    pub const TARGET: RegionSet = RegionSet(3);
    /// The whole domain `Ω`.
    pub const ALL: RegionSet = RegionSet(7);

    pub fn of(regions: &[Region]) -> Self {
        RegionSet(regions.iter().fold(0, |acc, r| acc | r.bit()))
    }

    pub fn contains(self, r: Region) -> bool {
        self.0 & r.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// An edge shared by two triangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorFace {
    pub edge: usize,
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: usize,
}

/// Conforming triangulation with region tags and face adjacency.
///
/// Immutable once built; every constructor recomputes the topology tables.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    tags: Vec<Region>,
    level: usize,
    edges: Vec<[usize; 2]>,
    tri_edges: Vec<[usize; 3]>,
    edge_triangles: Vec<Vec<usize>>,
    interior_faces: Vec<InteriorFace>,
    boundary_edges: Vec<usize>,
    boundary_vertices: Vec<usize>,
    on_boundary: Vec<bool>,
}

impl Mesh {
    /// Assembles a mesh from raw parts and derives edges, faces and the
    /// boundary. No invariant is checked here; use [`validate`].
    pub fn from_parts(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        tags: Vec<Region>,
        level: usize,
    ) -> Result<Self, MeshError> {
        if tags.len() != triangles.len() {
            return Err(MeshError::Invalid(format!(
                "{} tags for {} triangles",
                tags.len(),
                triangles.len()
            )));
        }
        let nv = vertices.len();
        if let Some(t) = triangles.iter().position(|t| t.iter().any(|&v| v >= nv)) {
            return Err(MeshError::Invalid(format!("triangle {t} references a missing vertex")));
        }
        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut edges = Vec::new();
        let mut edge_triangles: Vec<Vec<usize>> = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for (i, slot) in te.iter_mut().enumerate() {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                let key = if a < b { [a, b] } else { [b, a] };
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_triangles.push(Vec::with_capacity(2));
                    edges.len() - 1
                });
                edge_triangles[e].push(t);
                *slot = e;
            }
            tri_edges.push(te);
        }
        let mut interior_faces = Vec::new();
        let mut boundary_edges = Vec::new();
        let mut on_boundary = vec![false; nv];
        for (e, tris) in edge_triangles.iter().enumerate() {
            match tris.len() {
                1 => {
                    boundary_edges.push(e);
                    on_boundary[edges[e][0]] = true;
                    on_boundary[edges[e][1]] = true;
                }
                2 => interior_faces.push(InteriorFace {
                    edge: e,
                    vertices: edges[e],
                    left: tris[0],
                    right: tris[1],
                }),
                _ => {}
            }
        }
        let boundary_vertices = (0..nv).filter(|&v| on_boundary[v]).collect();
        Ok(Mesh {
            vertices,
            triangles,
            tags,
            level,
            edges,
            tri_edges,
            edge_triangles,
            interior_faces,
            boundary_edges,
            boundary_vertices,
            on_boundary,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn tags(&self) -> &[Region] {
        &self.tags
    }
    pub fn tag(&self, t: usize) -> Region {
        self.tags[t]
    }
    pub fn level(&self) -> usize {
        self.level
    }
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
    /// Unique edges as sorted vertex pairs, in order of first appearance.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    /// Edge indices of a triangle; local edge `i` is opposite local vertex `i`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }
    pub fn edge_triangles(&self, e: usize) -> &[usize] {
        &self.edge_triangles[e]
    }
    pub fn interior_faces(&self) -> &[InteriorFace] {
        &self.interior_faces
    }
    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }
    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.on_boundary[v]
    }
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_triangles[e].len() == 1
    }

    pub fn corners(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area of triangle `t` (positive for counter-clockwise order).
    pub fn signed_area(&self, t: usize) -> f64 {
        signed_area(self.corners(t))
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        diameter(self.corners(t))
    }

    /// Sum of element areas over a region set.
    pub fn region_area(&self, region: RegionSet) -> f64 {
        (0..self.n_triangles())
            .filter(|&t| region.contains(self.tags[t]))
            .map(|t| self.signed_area(t))
            .sum()
    }
}

pub(crate) fn signed_area(p: [[f64; 2]; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub(crate) fn diameter(p: [[f64; 2]; 3]) -> f64 {
    dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0]))
}
