use crate::error::FemError;

/// Polynomial order of the Lagrange element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    P1,
    P2,
}

/// Largest local basis (P2).
pub const MAX_LOCAL: usize = 6;

impl Order {
    pub fn from_k(k: usize) -> Result<Self, FemError> {
        match k {
            1 => Ok(Order::P1),
            2 => Ok(Order::P2),
            _ => Err(FemError::UnsupportedOrder(k)),
        }
    }

    pub fn k(self) -> usize {
        match self {
            Order::P1 => 1,
            Order::P2 => 2,
        }
    }

    pub fn n_local(self) -> usize {
        match self {
            Order::P1 => 3,
            Order::P2 => 6,
        }
    }

    /// Basis values at barycentric point `l`. Local nodes 0..3 are the
    /// vertices, node `3 + i` is the midpoint of the edge opposite vertex `i`.
    pub fn values(self, l: [f64; 3]) -> [f64; MAX_LOCAL] {
        let mut v = [0.0; MAX_LOCAL];
        match self {
            Order::P1 => v[..3].copy_from_slice(&l),
            Order::P2 => {
                for i in 0..3 {
                    v[i] = l[i] * (2.0 * l[i] - 1.0);
                    v[3 + i] = 4.0 * l[(i + 1) % 3] * l[(i + 2) % 3];
                }
            }
        }
        v
    }

    /// Physical gradients at barycentric point `l`.
    pub fn gradients(self, l: [f64; 3], gl: &[[f64; 2]; 3]) -> [[f64; 2]; MAX_LOCAL] {
        let mut g = [[0.0; 2]; MAX_LOCAL];
        match self {
            Order::P1 => g[..3].copy_from_slice(gl),
            Order::P2 => {
                for i in 0..3 {
                    let s = 4.0 * l[i] - 1.0;
                    g[i] = [s * gl[i][0], s * gl[i][1]];
                    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                    g[3 + i] = [
                        4.0 * (l[j] * gl[k][0] + l[k] * gl[j][0]),
                        4.0 * (l[j] * gl[k][1] + l[k] * gl[j][1]),
                    ];
                }
            }
        }
        g
    }

    /// Laplacians of the basis (constant on straight elements).
    pub fn laplacians(self, gl: &[[f64; 2]; 3]) -> [f64; MAX_LOCAL] {
        let mut d = [0.0; MAX_LOCAL];
        if self == Order::P2 {
            let ip = |a: usize, b: usize| gl[a][0] * gl[b][0] + gl[a][1] * gl[b][1];
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                d[i] = 4.0 * ip(i, i);
                d[3 + i] = 8.0 * ip(j, k);
            }
        }
        d
    }
}

/// Affine data of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub corners: [[f64; 2]; 3],
    pub area: f64,
    /// Gradients of the barycentric coordinates.
    pub grad_lambda: [[f64; 2]; 3],
    pub diameter: f64,
}

impl ElementGeometry {
    pub fn new(corners: [[f64; 2]; 3]) -> Self {
        let area = crate::mesh::signed_area(corners);
        let mut grad_lambda = [[0.0; 2]; 3];
        for (i, g) in grad_lambda.iter_mut().enumerate() {
            let pj = corners[(i + 1) % 3];
            let pk = corners[(i + 2) % 3];
            *g = [(pj[1] - pk[1]) / (2.0 * area), (pk[0] - pj[0]) / (2.0 * area)];
        }
        ElementGeometry { corners, area, grad_lambda, diameter: crate::mesh::diameter(corners) }
    }

    pub fn point(&self, l: [f64; 3]) -> [f64; 2] {
        let c = &self.corners;
        [
            l[0] * c[0][0] + l[1] * c[1][0] + l[2] * c[2][0],
            l[0] * c[0][1] + l[1] * c[1][1] + l[2] * c[2][1],
        ]
    }
}
