use super::element::{ElementGeometry, MAX_LOCAL};
use super::quadrature::{gauss_legendre_3, QuadratureRule};
use super::space::{FeSpace, SpaceKind};
use crate::error::FemError;
use crate::mesh::RegionSet;
use crate::sparse::{SparseMatrix, Triplet};

type Local = [[f64; MAX_LOCAL]; MAX_LOCAL];

/// Largest local block: the union of two P2 elements sharing an edge.
const MAX_PAIR: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormRole {
    Stiffness,
    MassRegion,
    Stab,
}

/// Assembled matrix tagged with its role and the row/column spaces.
#[derive(Debug, Clone)]
pub struct FormMatrix {
    pub matrix: SparseMatrix,
    pub role: FormRole,
    pub rows: SpaceKind,
    pub cols: SpaceKind,
}

/// Element loop producing symmetric-by-construction local blocks, merged in
/// element order (bit-identical for every execution strategy).
fn assemble_elements<F>(row: &FeSpace<'_>, col: &FeSpace<'_>, local: F) -> SparseMatrix
where
    F: Fn(usize, &ElementGeometry) -> Option<Local> + Sync + Send,
{
    let mesh = row.mesh();
    let n = row.n_local();
    let blocks = row.exec().map_range(mesh.n_triangles(), |t| local(t, &row.element_geometry(t)));
    let mut triplets: Vec<Triplet> = Vec::with_capacity(mesh.n_triangles() * n * n);
    for (t, block) in blocks.into_iter().enumerate() {
        let Some(block) = block else { continue };
        let rd = row.element_dofs(t);
        let cd = col.element_dofs(t);
        for a in 0..n {
            let Some(i) = rd[a] else { continue };
            for b in 0..n {
                if let Some(j) = cd[b] {
                    triplets.push((i, j, block[a][b]));
                }
            }
        }
    }
    SparseMatrix::from_triplets(row.n_dofs(), col.n_dofs(), triplets).expect("assembly indices are in range")
}

fn check_pair(row: &FeSpace<'_>, col: &FeSpace<'_>) -> Result<(), FemError> {
    if row.same_mesh(col) {
        Ok(())
    } else {
        Err(FemError::SpaceMismatch)
    }
}

fn local_stiffness(space: &FeSpace<'_>, geo: &ElementGeometry, q: &QuadratureRule) -> Local {
    let n = space.n_local();
    let order = space.order();
    let mut k = [[0.0; MAX_LOCAL]; MAX_LOCAL];
    for (l, w) in q.points.iter().zip(&q.weights) {
        let g = order.gradients(*l, &geo.grad_lambda);
        let jw = 2.0 * geo.area * w;
        for a in 0..n {
            for b in a..n {
                k[a][b] += jw * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
            }
        }
    }
    mirror(&mut k, n);
    k
}

fn local_mass(space: &FeSpace<'_>, geo: &ElementGeometry, q: &QuadratureRule) -> Local {
    let n = space.n_local();
    let mut m = [[0.0; MAX_LOCAL]; MAX_LOCAL];
    for (l, w) in q.points.iter().zip(&q.weights) {
        let v = space.order().values(*l);
        let jw = 2.0 * geo.area * w;
        for a in 0..n {
            for b in a..n {
                m[a][b] += jw * v[a] * v[b];
            }
        }
    }
    mirror(&mut m, n);
    m
}

fn mirror(m: &mut Local, n: usize) {
    for a in 0..n {
        for b in 0..a {
            m[a][b] = m[b][a];
        }
    }
}

/// `∫_Ω ∇φ_j·∇φ_i` with rows from `row` and columns from `col`; mixed pairs
/// (`V_{0h}` rows, `V_h` columns) give the coupling block of the saddle system.
pub fn assemble_stiffness(row: &FeSpace<'_>, col: &FeSpace<'_>) -> Result<FormMatrix, FemError> {
    check_pair(row, col)?;
    let q = QuadratureRule::triangle_degree4();
    let matrix = assemble_elements(row, col, |_, geo| Some(local_stiffness(row, geo, &q)));
    Ok(FormMatrix { matrix, role: FormRole::Stiffness, rows: row.kind(), cols: col.kind() })
}

/// `∫_region φ_j φ_i`.
pub fn assemble_region_mass(space: &FeSpace<'_>, region: RegionSet) -> Result<FormMatrix, FemError> {
    if region.is_empty() {
        return Err(FemError::EmptyRegion);
    }
    let q = QuadratureRule::triangle_degree4();
    let mesh = space.mesh();
    let matrix = assemble_elements(space, space, |t, geo| {
        region.contains(mesh.tag(t)).then(|| local_mass(space, geo, &q))
    });
    Ok(FormMatrix { matrix, role: FormRole::MassRegion, rows: space.kind(), cols: space.kind() })
}

/// The three pieces of the stabilization, kept apart so the Tikhonov scale
/// can be changed without reassembly.
#[derive(Debug, Clone)]
pub struct StabilizationParts {
    /// `Σ_T h_T² (Δu, Δv)_T`; structurally empty for P1.
    pub laplacian: SparseMatrix,
    /// `Σ_F h_F ([∂_n u], [∂_n v])_F` over interior faces, `h_F` the mean
    /// diameter of the two neighbours.
    pub jump: SparseMatrix,
    /// Unscaled `(u, v)_{L²(Ω)}`.
    pub mass: SparseMatrix,
    pub kind: SpaceKind,
}

impl StabilizationParts {
    /// `laplacian + jump + scale^{2k}·mass`.
    pub fn combine(&self, tikhonov_scale: f64) -> FormMatrix {
        let w = tikhonov_scale.powi(2 * self.kind.k as i32);
        let matrix = self
            .laplacian
            .add_scaled(1.0, &self.jump, 1.0)
            .and_then(|m| m.add_scaled(1.0, &self.mass, w))
            .expect("stabilization parts share a shape");
        FormMatrix { matrix, role: FormRole::Stab, rows: self.kind, cols: self.kind }
    }

    /// Part of the stabilization that acts on the PDE residual (everything but
    /// the Tikhonov mass).
    pub fn residual_part(&self) -> SparseMatrix {
        self.laplacian.add_scaled(1.0, &self.jump, 1.0).expect("same shape")
    }
}

pub fn stabilization_parts(space: &FeSpace<'_>) -> StabilizationParts {
    let q = QuadratureRule::triangle_degree4();
    let order = space.order();
    let n = space.n_local();
    let laplacian = if order.k() == 1 {
        SparseMatrix::zeros(space.n_dofs(), space.n_dofs())
    } else {
        assemble_elements(space, space, |_, geo| {
            let d = order.laplacians(&geo.grad_lambda);
            let w = geo.diameter * geo.diameter * geo.area;
            let mut m = [[0.0; MAX_LOCAL]; MAX_LOCAL];
            for a in 0..n {
                for b in a..n {
                    m[a][b] = w * d[a] * d[b];
                }
            }
            mirror(&mut m, n);
            Some(m)
        })
    };
    let mass = assemble_elements(space, space, |_, geo| Some(local_mass(space, geo, &q)));
    StabilizationParts { laplacian, jump: assemble_jump(space), mass, kind: space.kind() }
}

/// `s(u,v) = Σ_T h_T²(Δu,Δv)_T + Σ_F h_F([∇u·n],[∇v·n])_F + scale^{2k}(u,v)_Ω`,
/// boundary faces excluded.
pub fn assemble_stabilization(space: &FeSpace<'_>, tikhonov_scale: f64) -> FormMatrix {
    stabilization_parts(space).combine(tikhonov_scale)
}

fn assemble_jump(space: &FeSpace<'_>) -> SparseMatrix {
    let mesh = space.mesh();
    let order = space.order();
    let n = space.n_local();
    let faces = mesh.interior_faces();
    let line = gauss_legendre_3();
    let blocks = space.exec().map_slice(faces, |f| {
        let (t1, t2) = (f.left, f.right);
        let g1 = space.element_geometry(t1);
        let g2 = space.element_geometry(t2);
        let [p, q] = f.vertices;
        let (xp, xq) = (mesh.vertices()[p], mesh.vertices()[q]);
        let len = crate::mesh::dist(xp, xq);
        let h_face = 0.5 * (g1.diameter + g2.diameter);
        // unit normal pointing out of t1
        let mut normal = [(xq[1] - xp[1]) / len, -(xq[0] - xp[0]) / len];
        let interior = mesh.triangles()[t1].iter().find(|&&v| v != p && v != q).copied().unwrap();
        let xi = mesh.vertices()[interior];
        if normal[0] * (xi[0] - xp[0]) + normal[1] * (xi[1] - xp[1]) > 0.0 {
            normal = [-normal[0], -normal[1]];
        }
        let nodes1 = space.element_nodes(t1);
        let nodes2 = space.element_nodes(t2);
        let mut union: Vec<usize> = nodes1[..n].to_vec();
        let mut map2 = [0usize; MAX_LOCAL];
        for (b, node) in nodes2[..n].iter().enumerate() {
            map2[b] = match union.iter().position(|u| u == node) {
                Some(pos) => pos,
                None => {
                    union.push(*node);
                    union.len() - 1
                }
            };
        }
        let bary = |t: usize, s: f64| {
            let tri = mesh.triangles()[t];
            let mut l = [0.0; 3];
            for (i, &v) in tri.iter().enumerate() {
                if v == p {
                    l[i] = 1.0 - s;
                } else if v == q {
                    l[i] = s;
                }
            }
            l
        };
        let m = union.len();
        let mut block = [[0.0; MAX_PAIR]; MAX_PAIR];
        for (s, w) in line {
            let d1 = order.gradients(bary(t1, s), &g1.grad_lambda);
            let d2 = order.gradients(bary(t2, s), &g2.grad_lambda);
            let mut jump = [0.0; MAX_PAIR];
            for a in 0..n {
                jump[a] += d1[a][0] * normal[0] + d1[a][1] * normal[1];
                jump[map2[a]] -= d2[a][0] * normal[0] + d2[a][1] * normal[1];
            }
            // weight: mean diameter of the two neighbours, times the line measure |F|
            let c = w * len * h_face;
            for a in 0..m {
                for b in a..m {
                    block[a][b] += c * jump[a] * jump[b];
                }
            }
        }
        for a in 0..m {
            for b in 0..a {
                block[a][b] = block[b][a];
            }
        }
        (union, block)
    });
    let node_to_dof = node_dof_table(space);
    let mut triplets = Vec::with_capacity(faces.len() * 16);
    for (union, block) in blocks {
        for (a, &na) in union.iter().enumerate() {
            let Some(i) = node_to_dof[na] else { continue };
            for (b, &nb) in union.iter().enumerate() {
                if let Some(j) = node_to_dof[nb] {
                    triplets.push((i, j, block[a][b]));
                }
            }
        }
    }
    SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), triplets).expect("jump indices are in range")
}

fn node_dof_table(space: &FeSpace<'_>) -> Vec<Option<usize>> {
    let n_nodes = space.mesh().n_vertices() + if space.k() == 2 { space.mesh().n_edges() } else { 0 };
    let mut table = vec![None; n_nodes];
    for (d, &node) in space.dof_nodes().iter().enumerate() {
        table[node] = Some(d);
    }
    table
}

/// `∫_region g φ_i` by the degree-4 rule.
pub fn assemble_load_region(
    space: &FeSpace<'_>,
    g: &(dyn Fn([f64; 2]) -> f64 + Sync),
    region: RegionSet,
) -> Result<Vec<f64>, FemError> {
    if region.is_empty() {
        return Err(FemError::EmptyRegion);
    }
    let q = QuadratureRule::triangle_degree4();
    let mesh = space.mesh();
    let n = space.n_local();
    let blocks = space.exec().map_range(mesh.n_triangles(), |t| {
        if !region.contains(mesh.tag(t)) {
            return None;
        }
        let geo = space.element_geometry(t);
        let mut f = [0.0; MAX_LOCAL];
        for (l, w) in q.points.iter().zip(&q.weights) {
            let gv = g(geo.point(*l)) * 2.0 * geo.area * w;
            let v = space.order().values(*l);
            for a in 0..n {
                f[a] += gv * v[a];
            }
        }
        Some(f)
    });
    let mut out = vec![0.0; space.n_dofs()];
    for (t, f) in blocks.into_iter().enumerate() {
        let Some(f) = f else { continue };
        for (a, d) in space.element_dofs(t).iter().take(n).enumerate() {
            if let Some(i) = d {
                out[*i] += f[a];
            }
        }
    }
    Ok(out)
}

/// Coefficients `f(x_i)` at the dof coordinates.
pub fn interpolate_nodal(space: &FeSpace<'_>, f: &(dyn Fn([f64; 2]) -> f64 + Sync)) -> Vec<f64> {
    space.dof_coords().iter().map(|&x| f(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_disk_mesh, mesh_metrics, Geometry, Mesh, Region};
    use crate::sparse::dot;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_triangle() -> Mesh {
        Mesh::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], vec![Region::OmegaData], 0)
            .unwrap()
    }

    fn disk(level: usize) -> Mesh {
        build_disk_mesh(&Geometry::default(), 8, level).unwrap()
    }

    fn random_vec(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn unit_triangle_stiffness() {
        let m = unit_triangle();
        let s = FeSpace::new(&m, 1, false).unwrap();
        let a = assemble_stiffness(&s, &s).unwrap().matrix.to_dense();
        let expected = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unit_triangle_mass() {
        let m = unit_triangle();
        let s = FeSpace::new(&m, 1, false).unwrap();
        let a = assemble_region_mass(&s, RegionSet::ALL).unwrap().matrix.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 2.0 } else { 1.0 } / 24.0;
                assert!((a[i][j] - e).abs() < 1e-16);
            }
        }
        assert_eq!(assemble_region_mass(&s, RegionSet::EMPTY).unwrap_err(), FemError::EmptyRegion);
    }

    #[test]
    fn stiffness_annihilates_constants_and_is_symmetric() {
        let m = disk(2);
        for k in [1, 2] {
            let s = FeSpace::new(&m, k, false).unwrap();
            let a = assemble_stiffness(&s, &s).unwrap().matrix;
            assert!(a.is_symmetric());
            let r = a.matvec(&vec![3.0; s.n_dofs()]).unwrap();
            assert!(r.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn mixed_stiffness_shape() {
        let m = disk(1);
        let v = FeSpace::new(&m, 1, false).unwrap();
        let v0 = FeSpace::new(&m, 1, true).unwrap();
        let b = assemble_stiffness(&v0, &v).unwrap();
        assert_eq!((b.matrix.n_rows(), b.matrix.n_cols()), (v0.n_dofs(), v.n_dofs()));
        let m2 = disk(1);
        let other = FeSpace::new(&m2, 1, false).unwrap();
        assert_eq!(assemble_stiffness(&v, &other).unwrap_err(), FemError::SpaceMismatch);
    }

    #[test]
    fn mass_partition_of_unity() {
        let m = disk(2);
        for k in [1, 2] {
            let s = FeSpace::new(&m, k, false).unwrap();
            for region in [RegionSet::OMEGA, RegionSet::TARGET, RegionSet::ALL] {
                let mm = assemble_region_mass(&s, region).unwrap().matrix;
                assert!(mm.is_symmetric());
                let ones = vec![1.0; s.n_dofs()];
                let total = mm.bilinear(&ones, &ones).unwrap();
                assert!((total - m.region_area(region)).abs() < 1e-12);
                let load = assemble_load_region(&s, &|_| 1.0, region).unwrap();
                let rows = mm.matvec(&ones).unwrap();
                for (a, b) in load.iter().zip(&rows) {
                    assert!((a - b).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn load_examples() {
        let m = disk(2);
        let s = FeSpace::new(&m, 1, false).unwrap();
        let odd = assemble_load_region(&s, &|x| x[0], RegionSet::ALL).unwrap();
        assert!(odd.iter().sum::<f64>().abs() < 1e-14);
        // g = φ_1 on the unit triangle is the hat x ↦ x₁
        let t = unit_triangle();
        let s1 = FeSpace::new(&t, 1, false).unwrap();
        let mass = assemble_region_mass(&s1, RegionSet::ALL).unwrap().matrix;
        let load = assemble_load_region(&s1, &|x| x[0], RegionSet::ALL).unwrap();
        let col = mass.matvec(&[0.0, 1.0, 0.0]).unwrap();
        for (a, b) in load.iter().zip(&col) {
            assert!((a - b).abs() < 1e-16);
        }
    }

    #[test]
    fn interpolation_examples() {
        let m = disk(1);
        let s = FeSpace::new(&m, 2, true).unwrap();
        assert!(interpolate_nodal(&s, &|_| 1.0).iter().all(|&v| v == 1.0));
        let s1 = FeSpace::new(&m, 1, false).unwrap();
        let c = interpolate_nodal(&s1, &|x| 2.0 - x[1]);
        assert_eq!(c.len(), s1.n_dofs());
    }

    #[test]
    fn kink_jump_by_hand() {
        // u = max(0, x₁) on a diamond: unit normal jump across the edge x₁ = 0
        // of length 2, both neighbours of diameter 2 → 2 · 2 = 4
        let m = Mesh::from_parts(
            vec![[-1.0, 0.0], [0.0, -1.0], [0.0, 1.0], [1.0, 0.0]],
            vec![[0, 1, 2], [3, 2, 1]],
            vec![Region::OmegaData; 2],
            0,
        )
        .unwrap();
        let s = FeSpace::new(&m, 1, false).unwrap();
        let parts = stabilization_parts(&s);
        let u = [0.0, 0.0, 0.0, 1.0];
        assert!((parts.jump.bilinear(&u, &u).unwrap() - 4.0).abs() < 1e-13);
    }

    #[test]
    fn affine_stabilization_is_pure_tikhonov() {
        let m = disk(2);
        let s = FeSpace::new(&m, 1, false).unwrap();
        let parts = stabilization_parts(&s);
        assert_eq!(parts.laplacian.nnz(), 0);
        let w = interpolate_nodal(&s, &|x| 0.5 + 2.0 * x[0] - x[1]);
        let jw = parts.jump.matvec(&w).unwrap();
        assert!(jw.iter().all(|v| v.abs() < 1e-12));
        let h = mesh_metrics(&m).h;
        let stab = parts.combine(h).matrix;
        let l2 = parts.mass.bilinear(&w, &w).unwrap();
        let sw = stab.bilinear(&w, &w).unwrap();
        assert!((sw - h * h * l2).abs() < 1e-12 * sw);
    }

    #[test]
    fn quadratic_stabilization_is_laplacian_only() {
        let m = disk(2);
        let s = FeSpace::new(&m, 2, false).unwrap();
        let parts = stabilization_parts(&s);
        let w = interpolate_nodal(&s, &|x| x[0] * x[0]);
        let jw = parts.jump.matvec(&w).unwrap();
        assert!(jw.iter().all(|v| v.abs() < 1e-11), "{}", jw.iter().fold(0.0f64, |a, b| a.max(b.abs())));
        let lap = parts.laplacian.bilinear(&w, &w).unwrap();
        let expected: f64 = (0..m.n_triangles()).map(|t| m.diameter(t).powi(2) * 4.0 * m.signed_area(t)).sum();
        assert!((lap - expected).abs() < 1e-12 * expected);
        // quadratic harmonic field: zero Laplacian and zero jumps
        let hm = interpolate_nodal(&s, &|x| x[0] * x[0] - x[1] * x[1] + x[0] * x[1]);
        let r = parts.residual_part().bilinear(&hm, &hm).unwrap();
        assert!(r.abs() < 1e-11, "{r}");
    }

    #[test]
    fn stabilization_is_symmetric_and_positive() {
        let m = disk(2);
        for k in [1, 2] {
            let s = FeSpace::new(&m, k, false).unwrap();
            let parts = stabilization_parts(&s);
            let stab = parts.combine(0.1).matrix;
            assert!(stab.is_symmetric());
            assert!(parts.jump.is_symmetric() && parts.laplacian.is_symmetric());
            for seed in 0..20 {
                let v = random_vec(s.n_dofs(), seed);
                let total = stab.bilinear(&v, &v).unwrap();
                let sum = parts.laplacian.bilinear(&v, &v).unwrap()
                    + parts.jump.bilinear(&v, &v).unwrap()
                    + 0.1f64.powi(2 * k as i32) * parts.mass.bilinear(&v, &v).unwrap();
                assert!(total > 0.0);
                assert!((total - sum).abs() < 1e-12 * total);
                for part in [&parts.laplacian, &parts.jump, &parts.mass] {
                    assert!(part.bilinear(&v, &v).unwrap() >= -1e-12 * part.max_abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn jump_vanishes_for_global_polynomials_of_degree_k() {
        let m = disk(2);
        let s1 = FeSpace::new(&m, 1, false).unwrap();
        let j1 = stabilization_parts(&s1).jump;
        let v = interpolate_nodal(&s1, &|x| 1.0 - 3.0 * x[0] + 0.25 * x[1]);
        assert!(j1.matvec(&v).unwrap().iter().all(|r| r.abs() < 1e-12));
        let s2 = FeSpace::new(&m, 2, false).unwrap();
        let j2 = stabilization_parts(&s2).jump;
        let v = interpolate_nodal(&s2, &|x| 1.0 + x[0] - 2.0 * x[0] * x[1] + 0.7 * x[1] * x[1]);
        assert!(j2.matvec(&v).unwrap().iter().all(|r| r.abs() < 1e-11));
        // and does not vanish for a non-polynomial field
        let w = interpolate_nodal(&s1, &|x| (3.0 * x[0]).sin());
        assert!(j1.bilinear(&w, &w).unwrap() > 1e-6);
    }

    #[test]
    fn assembly_is_bit_identical_across_strategies() {
        let m = disk(3);
        for k in [1, 2] {
            let seq = FeSpace::new(&m, k, false).unwrap().with_exec(crate::Exec::Sequential);
            let par = FeSpace::new(&m, k, false).unwrap().with_exec(crate::Exec::Parallel);
            assert_eq!(assemble_stiffness(&seq, &seq).unwrap().matrix, assemble_stiffness(&par, &par).unwrap().matrix);
            let (a, b) = (stabilization_parts(&seq), stabilization_parts(&par));
            assert_eq!(a.jump, b.jump);
            assert_eq!(a.laplacian, b.laplacian);
            let f = |x: [f64; 2]| (x[0] * 5.0).cos();
            assert_eq!(
                assemble_load_region(&seq, &f, RegionSet::OMEGA).unwrap(),
                assemble_load_region(&par, &f, RegionSet::OMEGA).unwrap()
            );
        }
    }

    #[test]
    fn rayleigh_quotients_nonnegative() {
        let m = disk(2);
        let s = FeSpace::new(&m, 2, false).unwrap();
        let a = assemble_stiffness(&s, &s).unwrap().matrix;
        let mm = assemble_region_mass(&s, RegionSet::OMEGA).unwrap().matrix;
        for seed in 0..10 {
            let v = random_vec(s.n_dofs(), 100 + seed);
            assert!(a.bilinear(&v, &v).unwrap() >= -1e-12 * a.max_abs());
            assert!(mm.bilinear(&v, &v).unwrap() >= -1e-12 * mm.max_abs());
            assert!(dot(&v, &v) > 0.0);
        }
    }
}
