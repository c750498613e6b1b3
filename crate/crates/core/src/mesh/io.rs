//! Line-oriented mesh text format.
//!
//! ```text
//! mesh v1 <nv> <nt>
//! v <x> <y>
//! t <i> <j> <k> <TAG>
//! ```

use std::fmt::Write as _;

use super::{Mesh, Region};
use crate::error::MeshError;

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::with_capacity(40 * (mesh.n_vertices() + mesh.n_triangles()));
    let _ = writeln!(out, "mesh v1 {} {}", mesh.n_vertices(), mesh.n_triangles());
    for x in mesh.vertices() {
        let _ = writeln!(out, "v {:e} {:e}", x[0], x[1]);
    }
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let _ = writeln!(out, "t {} {} {} {}", tri[0], tri[1], tri[2], mesh.tag(t).name());
    }
    out
}

pub fn read_mesh(text: &str) -> Result<Mesh, MeshError> {
    let err = |line: usize, msg: &str| MeshError::Format(format!("line {}: {msg}", line + 1));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| MeshError::Format("empty input".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "mesh" || h[1] != "v1" {
        return Err(err(hl, "expected `mesh v1 <nv> <nt>`"));
    }
    let nv: usize = h[2].parse().map_err(|_| err(hl, "bad vertex count"))?;
    let nt: usize = h[3].parse().map_err(|_| err(hl, "bad triangle count"))?;
    let mut vertices = Vec::with_capacity(nv);
    let mut triangles = Vec::with_capacity(nt);
    let mut tags = Vec::with_capacity(nt);
    for (ln, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.first().copied() {
            Some("v") if f.len() == 3 && triangles.is_empty() => {
                let x: f64 = f[1].parse().map_err(|_| err(ln, "bad coordinate"))?;
                let y: f64 = f[2].parse().map_err(|_| err(ln, "bad coordinate"))?;
                vertices.push([x, y]);
            }
            Some("t") if f.len() == 5 => {
                let mut tri = [0usize; 3];
                for (slot, s) in tri.iter_mut().zip(&f[1..4]) {
                    *slot = s.parse().map_err(|_| err(ln, "bad vertex index"))?;
                }
                triangles.push(tri);
                tags.push(Region::from_name(f[4]).ok_or_else(|| err(ln, "unknown tag"))?);
            }
            _ => return Err(err(ln, "unexpected record")),
        }
    }
    if vertices.len() != nv || triangles.len() != nt {
        return Err(MeshError::Format(format!(
            "header declares {nv} vertices / {nt} triangles, found {} / {}",
            vertices.len(),
            triangles.len()
        )));
    }
    Mesh::from_parts(vertices, triangles, tags, 0)
}
