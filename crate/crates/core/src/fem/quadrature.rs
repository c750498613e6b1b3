/// Rule on the reference triangle `{(0,0), (1,0), (0,1)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Barycentric coordinates `(λ0, λ1, λ2)` of each point.
    pub points: Vec<[f64; 3]>,
    /// Weights summing to the reference area 1/2.
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadratureRule {
    /// Symmetric six-point rule, exact through degree 4.
    pub fn triangle_degree4() -> Self {
        const A: f64 = 0.445_948_490_915_965;
        const WA: f64 = 0.223_381_589_678_011;
        const B: f64 = 0.091_576_213_509_771;
        const WB: f64 = 0.109_951_743_655_322;
        let points = vec![
            [1.0 - 2.0 * A, A, A],
            [A, 1.0 - 2.0 * A, A],
            [A, A, 1.0 - 2.0 * A],
            [1.0 - 2.0 * B, B, B],
            [B, 1.0 - 2.0 * B, B],
            [B, B, 1.0 - 2.0 * B],
        ];
        let weights = vec![WA / 2.0, WA / 2.0, WA / 2.0, WB / 2.0, WB / 2.0, WB / 2.0];
        QuadratureRule { points, weights, exact_degree: 4 }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Three-point Gauss-Legendre rule on `[0, 1]` (exact through degree 5):
/// `(abscissa, weight)` with weights summing to 1.
pub fn gauss_legendre_3() -> [(f64, f64); 3] {
    let s = (0.6f64).sqrt() / 2.0;
    [(0.5 - s, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + s, 5.0 / 18.0)]
}
