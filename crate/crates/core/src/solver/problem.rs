use serde::{Deserialize, Serialize};

use super::perturbation::PerturbationSpec;
use crate::analysis::{sobolev_norm_sq, HarmonicMonomial};
use crate::exec::Exec;
use crate::fem::ScalarField;
use crate::mesh::Geometry;

/// The harmonic function whose trace on `ω` is the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExactSolution {
    Monomial(HarmonicMonomial),
    /// `c0 + c1 x₁ + c2 x₂`.
    Affine([f64; 3]),
    Zero,
}

impl ExactSolution {
    /// `‖u‖_{H^s(B(ρ))}`, used to size `h_min` and the stagnation level.
    pub fn sobolev_norm(&self, s: u32, rho: f64) -> f64 {
        use std::f64::consts::PI;
        match *self {
            ExactSolution::Monomial(m) => sobolev_norm_sq(&m, s, rho).sqrt(),
            ExactSolution::Affine([c0, c1, c2]) => {
                let g2 = c1 * c1 + c2 * c2;
                let mut sq = PI * rho * rho * c0 * c0 + g2 * PI * rho.powi(4) / 4.0;
                if s >= 1 {
                    sq += g2 * PI * rho * rho;
                }
                sq.sqrt()
            }
            ExactSolution::Zero => 0.0,
        }
    }
}

impl ScalarField for ExactSolution {
    fn value(&self, x: [f64; 2]) -> f64 {
        match self {
            ExactSolution::Monomial(m) => m.value(x),
            ExactSolution::Affine(c) => c[0] + c[1] * x[0] + c[2] * x[1],
            ExactSolution::Zero => 0.0,
        }
    }
    fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        match self {
            ExactSolution::Monomial(m) => m.gradient(x),
            ExactSolution::Affine(c) => [c[1], c[2]],
            ExactSolution::Zero => [0.0, 0.0],
        }
    }
}

/// One unique-continuation solve: data `q̃ = u|_ω + δq`.
#[derive(Debug, Clone, PartialEq)]
pub struct UcProblem {
    pub geometry: Geometry,
    pub k: usize,
    pub exact: ExactSolution,
    pub perturbation: PerturbationSpec,
    /// When set, the Tikhonov term uses `max(h, h_min)` instead of `h`.
    pub tikhonov_override: Option<f64>,
    pub exec: Exec,
}

impl UcProblem {
    pub fn new(geometry: Geometry, k: usize, exact: ExactSolution) -> Self {
        UcProblem {
            geometry,
            k,
            exact,
            perturbation: PerturbationSpec::default(),
            tikhonov_override: None,
            exec: Exec::default(),
        }
    }
}

/// Squared contributions to `|||(u, z)|||²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleNormParts {
    pub stab: f64,
    pub dual: f64,
    pub data: f64,
}

impl TripleNormParts {
    pub fn total(&self) -> f64 {
        (self.stab + self.dual + self.data).max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UcDiagnostics {
    /// `‖Kx − b‖₂ / (‖K‖_max ‖x‖₂ + ‖b‖₂)`.
    pub solve_residual: f64,
    /// Parts of `|||(u_h, z_h)|||²`.
    pub triple_norm_parts: TripleNormParts,
    pub h: f64,
    pub tikhonov_scale: f64,
    pub n_primal: usize,
    pub n_dual: usize,
    pub perturbation_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UcSolution {
    pub u: Vec<f64>,
    pub z: Vec<f64>,
    pub diagnostics: UcDiagnostics,
}
