use serde::Serialize;

use super::{diameter, dist, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshMetrics {
    /// Largest element diameter.
    pub h: f64,
    /// Smallest element diameter.
    pub h_min_elem: f64,
    /// Largest per-element ratio diameter / inscribed-circle diameter.
    pub shape_ratio: f64,
    /// Largest element diameter over smallest inscribed-circle diameter.
    pub quasi_uniformity: f64,
}

fn inscribed_diameter(p: [[f64; 2]; 3]) -> f64 {
    let perimeter = dist(p[0], p[1]) + dist(p[1], p[2]) + dist(p[2], p[0]);
    4.0 * super::signed_area(p).abs() / perimeter
}

pub fn mesh_metrics(mesh: &Mesh) -> MeshMetrics {
    let mut h: f64 = 0.0;
    let mut h_min = f64::INFINITY;
    let mut shape: f64 = 0.0;
    let mut min_inscribed = f64::INFINITY;
    for t in 0..mesh.n_triangles() {
        let p = mesh.corners(t);
        let d = diameter(p);
        let rho = inscribed_diameter(p);
        h = h.max(d);
        h_min = h_min.min(d);
        shape = shape.max(d / rho);
        min_inscribed = min_inscribed.min(rho);
    }
    MeshMetrics { h, h_min_elem: h_min, shape_ratio: shape, quasi_uniformity: h / min_inscribed }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    /// Triangle with non-positive signed area.
    Orientation { triangle: usize, area: f64 },
    /// Triangle repeating a vertex.
    Degenerate { triangle: usize },
    /// Edge shared by more than two triangles.
    Conformity { edge: [usize; 2], triangles: Vec<usize> },
    /// Vertex not used by any triangle.
    Orphan { vertex: usize },
    /// Non-finite coordinate.
    Coordinate { vertex: usize },
}

/// Result of [`validate`]; empty `violations` means the mesh is sound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
    pub metrics: MeshMetrics,
}

impl Diagnostics {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks orientation, conformity and vertex usage. Never fails; problems
/// are listed in the report.
pub fn validate(mesh: &Mesh) -> Diagnostics {
    let mut violations = Vec::new();
    for (v, x) in mesh.vertices().iter().enumerate() {
        if !x[0].is_finite() || !x[1].is_finite() {
            violations.push(Violation::Coordinate { vertex: v });
        }
    }
    let mut used = vec![false; mesh.n_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for &v in tri {
            used[v] = true;
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            violations.push(Violation::Degenerate { triangle: t });
            continue;
        }
        let area = mesh.signed_area(t);
        if !(area > 0.0) {
            violations.push(Violation::Orientation { triangle: t, area });
        }
    }
    for (e, edge) in mesh.edges().iter().enumerate() {
        let tris = mesh.edge_triangles(e);
        if tris.len() > 2 {
            violations.push(Violation::Conformity { edge: *edge, triangles: tris.to_vec() });
        }
    }
    for (v, u) in used.iter().enumerate() {
        if !u {
            violations.push(Violation::Orphan { vertex: v });
        }
    }
    Diagnostics { violations, metrics: mesh_metrics(mesh) }
}
