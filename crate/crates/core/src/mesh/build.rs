use std::collections::HashMap;
use std::f64::consts::PI;

use super::{signed_area, Geometry, Mesh, Region};
use crate::error::MeshError;

/// Builds the ring mesh of `B(r3)`: a center fan inside `r1` and two
/// triangulated annuli, each ring carrying `sectors` equally spaced vertices,
/// followed by `level` red refinements.
pub fn build_disk_mesh(geometry: &Geometry, sectors: usize, level: usize) -> Result<Mesh, MeshError> {
    geometry.check()?;
    if geometry.dim != 2 {
        return Err(MeshError::Geometry(format!("only dim = 2 can be meshed (got {})", geometry.dim)));
    }
    if sectors < 6 || !sectors.is_multiple_of(2) {
        return Err(MeshError::Sectors(sectors));
    }
    let n = sectors;
    let mut vertices = Vec::with_capacity(1 + 3 * n);
    vertices.push([0.0, 0.0]);
    for r in geometry.radii() {
        for j in 0..n {
            let theta = 2.0 * PI * j as f64 / n as f64;
            vertices.push([r * theta.cos(), r * theta.sin()]);
        }
    }
    let ring = |ring: usize, j: usize| 1 + ring * n + (j % n);

    let mut triangles = Vec::with_capacity(5 * n);
    let mut tags = Vec::with_capacity(5 * n);
    for j in 0..n {
        triangles.push([0, ring(0, j), ring(0, j + 1)]);
        tags.push(Region::OmegaData);
    }
    for (band, tag) in [(0, Region::TargetAnnulus), (1, Region::OuterAnnulus)] {
        for j in 0..n {
            let (a0, a1) = (ring(band, j), ring(band, j + 1));
            let (b0, b1) = (ring(band + 1, j), ring(band + 1, j + 1));
            // alternate the diagonal so the pattern is mirror symmetric
            if j % 2 == 0 {
                triangles.push([a0, b0, b1]);
                triangles.push([a0, b1, a1]);
            } else {
                triangles.push([a0, b0, a1]);
                triangles.push([b0, b1, a1]);
            }
            tags.push(tag);
            tags.push(tag);
        }
    }
    for (t, tri) in triangles.iter().enumerate() {
        let area = signed_area([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]);
        if area <= 0.0 {
            return Err(MeshError::Invalid(format!("base triangle {t} has area {area}")));
        }
    }
    let mut mesh = Mesh::from_parts(vertices, triangles, tags, 0)?;
    for _ in 0..level {
        mesh = refine_uniform(&mesh, geometry)?;
    }
    Ok(mesh)
}

/// Red refinement: every triangle is split into four through its edge
/// midpoints. Midpoints of edges whose endpoints both lie on one of the
/// circles `r1`, `r2`, `r3` are pushed radially onto that circle.
pub fn refine_uniform(mesh: &Mesh, geometry: &Geometry) -> Result<Mesh, MeshError> {
    geometry.check()?;
    let circle: Vec<Option<usize>> = mesh.vertices().iter().map(|&x| geometry.circle_of(x)).collect();
    let radii = geometry.radii();
    let mut vertices = mesh.vertices().to_vec();
    vertices.reserve(mesh.n_edges());
    let mut midpoint: HashMap<[usize; 2], usize> = HashMap::with_capacity(mesh.n_edges());
    let mut triangles = Vec::with_capacity(4 * mesh.n_triangles());
    let mut tags = Vec::with_capacity(4 * mesh.n_triangles());

    for (t, &[a, b, c]) in mesh.triangles().iter().enumerate() {
        let mut mid = |p: usize, q: usize| -> usize {
            let key = if p < q { [p, q] } else { [q, p] };
            *midpoint.entry(key).or_insert_with(|| {
                let (xp, xq) = (vertices[p], vertices[q]);
                let mut m = [0.5 * (xp[0] + xq[0]), 0.5 * (xp[1] + xq[1])];
                if let (Some(cp), Some(cq)) = (circle[p], circle[q]) {
                    if cp == cq {
                        let s = radii[cp] / m[0].hypot(m[1]);
                        m = [m[0] * s, m[1] * s];
                    }
                }
                vertices.push(m);
                vertices.len() - 1
            })
        };
        let ab = mid(a, b);
        let bc = mid(b, c);
        let ca = mid(c, a);
        triangles.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        tags.extend_from_slice(&[mesh.tag(t); 4]);
    }
    Mesh::from_parts(vertices, triangles, tags, mesh.level() + 1)
}
