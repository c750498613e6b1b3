use super::element::{ElementGeometry, Order, MAX_LOCAL};
use crate::error::FemError;
use crate::exec::Exec;
use crate::mesh::Mesh;

/// Identifies a space up to its mesh: order and Dirichlet constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceKind {
    pub k: usize,
    pub dirichlet: bool,
}

/// Continuous Lagrange space of order `k` on a mesh; with `dirichlet` every
/// node on the boundary polygon is removed (the space `V_{0h}`).
///
/// Geometric nodes are numbered vertices first, then edge midpoints (P2).
#[derive(Debug, Clone)]
pub struct FeSpace<'m> {
    mesh: &'m Mesh,
    order: Order,
    dirichlet: bool,
    exec: Exec,
    node_dof: Vec<Option<usize>>,
    dof_node: Vec<usize>,
    dof_coords: Vec<[f64; 2]>,
}

impl<'m> FeSpace<'m> {
    pub fn new(mesh: &'m Mesh, k: usize, dirichlet: bool) -> Result<Self, FemError> {
        let order = Order::from_k(k)?;
        let nv = mesh.n_vertices();
        let n_nodes = match order {
            Order::P1 => nv,
            Order::P2 => nv + mesh.n_edges(),
        };
        let mut node_dof = vec![None; n_nodes];
        let mut dof_node = Vec::with_capacity(n_nodes);
        let mut dof_coords = Vec::with_capacity(n_nodes);
        for (node, slot) in node_dof.iter_mut().enumerate() {
            let (on_boundary, x) = if node < nv {
                (mesh.is_boundary_vertex(node), mesh.vertices()[node])
            } else {
                let e = node - nv;
                let [p, q] = mesh.edges()[e];
                let (xp, xq) = (mesh.vertices()[p], mesh.vertices()[q]);
                (mesh.is_boundary_edge(e), [0.5 * (xp[0] + xq[0]), 0.5 * (xp[1] + xq[1])])
            };
            if dirichlet && on_boundary {
                continue;
            }
            *slot = Some(dof_node.len());
            dof_node.push(node);
            dof_coords.push(x);
        }
        Ok(FeSpace { mesh, order, dirichlet, exec: Exec::default(), node_dof, dof_node, dof_coords })
    }

    /// Same space with a different execution strategy for its assembly loops.
    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }
    pub fn order(&self) -> Order {
        self.order
    }
    pub fn k(&self) -> usize {
        self.order.k()
    }
    pub fn is_dirichlet(&self) -> bool {
        self.dirichlet
    }
    pub fn exec(&self) -> Exec {
        self.exec
    }
    pub fn kind(&self) -> SpaceKind {
        SpaceKind { k: self.k(), dirichlet: self.dirichlet }
    }
    pub fn n_dofs(&self) -> usize {
        self.dof_node.len()
    }
    pub fn n_local(&self) -> usize {
        self.order.n_local()
    }
    pub fn dof_coords(&self) -> &[[f64; 2]] {
        &self.dof_coords
    }
    /// Geometric node of each dof.
    pub fn dof_nodes(&self) -> &[usize] {
        &self.dof_node
    }

    /// Geometric node indices of element `t` in local order.
    pub fn element_nodes(&self, t: usize) -> [usize; MAX_LOCAL] {
        let tri = self.mesh.triangles()[t];
        let mut n = [0; MAX_LOCAL];
        n[..3].copy_from_slice(&tri);
        if self.order == Order::P2 {
            let nv = self.mesh.n_vertices();
            for (i, e) in self.mesh.triangle_edges(t).iter().enumerate() {
                n[3 + i] = nv + e;
            }
        }
        n
    }

    /// Global dofs of element `t`; `None` marks an eliminated boundary node.
    pub fn element_dofs(&self, t: usize) -> [Option<usize>; MAX_LOCAL] {
        let nodes = self.element_nodes(t);
        let mut d = [None; MAX_LOCAL];
        for a in 0..self.n_local() {
            d[a] = self.node_dof[nodes[a]];
        }
        d
    }

    pub fn element_geometry(&self, t: usize) -> ElementGeometry {
        ElementGeometry::new(self.mesh.corners(t))
    }

    /// Value and gradient of the discrete function `coeffs` on element `t`
    /// at barycentric point `l`.
    pub fn eval_local(&self, t: usize, geo: &ElementGeometry, coeffs: &[f64], l: [f64; 3]) -> (f64, [f64; 2]) {
        let dofs = self.element_dofs(t);
        let v = self.order.values(l);
        let g = self.order.gradients(l, &geo.grad_lambda);
        let mut val = 0.0;
        let mut grad = [0.0; 2];
        for a in 0..self.n_local() {
            if let Some(d) = dofs[a] {
                val += coeffs[d] * v[a];
                grad[0] += coeffs[d] * g[a][0];
                grad[1] += coeffs[d] * g[a][1];
            }
        }
        (val, grad)
    }

    pub(crate) fn same_mesh(&self, other: &FeSpace<'_>) -> bool {
        std::ptr::eq(self.mesh, other.mesh) && self.order == other.order
    }
}
