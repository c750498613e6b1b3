use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::fem::{assemble_load_region, assemble_region_mass, error_norms, FeSpace, FnField};
use crate::mesh::{Geometry, RegionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationMode {
    None,
    Oscillatory,
    NodalNoise,
}

impl PerturbationMode {
    pub fn name(self) -> &'static str {
        match self {
            PerturbationMode::None => "none",
            PerturbationMode::Oscillatory => "oscillatory",
            PerturbationMode::NodalNoise => "nodal_noise",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [PerturbationMode::None, PerturbationMode::Oscillatory, PerturbationMode::NodalNoise]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub mode: PerturbationMode,
    /// Target `‖δq‖_{L²(ω)}`.
    pub epsilon: f64,
    pub kappa: f64,
    pub seed: u64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        PerturbationSpec { mode: PerturbationMode::None, epsilon: 0.0, kappa: 10.0, seed: 0 }
    }
}

impl PerturbationSpec {
    pub fn oscillatory(epsilon: f64, kappa: f64) -> Self {
        PerturbationSpec { mode: PerturbationMode::Oscillatory, epsilon, kappa, seed: 0 }
    }

    pub fn nodal_noise(epsilon: f64, seed: u64) -> Self {
        PerturbationSpec { mode: PerturbationMode::NodalNoise, epsilon, kappa: 0.0, seed }
    }

    pub fn is_active(&self) -> bool {
        self.mode != PerturbationMode::None && self.epsilon > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Field {
    Zero,
    Oscillatory { amplitude: f64, kappa: f64 },
    /// Finite element function on the space the perturbation was built for.
    Nodal(Vec<f64>),
}

/// A data perturbation `δq` on `ω` with its norm measured on the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPerturbation {
    field: Field,
    certified_norm: f64,
}

fn oscillation(kappa: f64) -> impl Fn([f64; 2]) -> f64 + Sync {
    move |x| (kappa * x[0]).sin() * (kappa * x[1]).sin()
}

fn oscillation_grad(kappa: f64) -> impl Fn([f64; 2]) -> [f64; 2] + Sync {
    move |x| {
        let (s1, c1) = (kappa * x[0]).sin_cos();
        let (s2, c2) = (kappa * x[1]).sin_cos();
        [kappa * c1 * s2, kappa * s1 * c2]
    }
}

fn oscillation_norm(space: &FeSpace<'_>, amplitude: f64, kappa: f64) -> f64 {
    let g = oscillation(kappa);
    let dg = oscillation_grad(kappa);
    let field = FnField(move |x: [f64; 2]| amplitude * g(x), move |x: [f64; 2]| dg(x).map(|d| amplitude * d));
    let zero = vec![0.0; space.n_dofs()];
    error_norms(space, &zero, &field, RegionSet::OMEGA).expect("omega is nonempty").l2
}

/// Builds `δq` with `‖δq‖_{L²(ω)} = ε`, the norm taken by quadrature over the
/// tagged data elements of `space`'s mesh.
pub fn make_perturbation(
    geometry: &Geometry,
    spec: &PerturbationSpec,
    space: &FeSpace<'_>,
) -> Result<DataPerturbation, AnalysisError> {
    geometry.check().map_err(|e| AnalysisError::Perturbation(e.to_string()))?;
    if !(spec.epsilon >= 0.0 && spec.epsilon.is_finite()) {
        return Err(AnalysisError::Perturbation(format!("epsilon = {} must be finite and >= 0", spec.epsilon)));
    }
    if !spec.is_active() {
        return Ok(DataPerturbation { field: Field::Zero, certified_norm: 0.0 });
    }
    match spec.mode {
        PerturbationMode::None => unreachable!("inactive"),
        PerturbationMode::Oscillatory => {
            let norm = oscillation_norm(space, 1.0, spec.kappa);
            if !(norm > 0.0) {
                return Err(AnalysisError::Perturbation(format!(
                    "sin(kx1)sin(kx2) vanishes on the data set for kappa = {}",
                    spec.kappa
                )));
            }
            let amplitude = spec.epsilon / norm;
            let certified_norm = oscillation_norm(space, amplitude, spec.kappa);
            Ok(DataPerturbation { field: Field::Oscillatory { amplitude, kappa: spec.kappa }, certified_norm })
        }
        PerturbationMode::NodalNoise => {
            let mesh = space.mesh();
            let mut in_omega = vec![false; space.n_dofs()];
            for t in 0..mesh.n_triangles() {
                if RegionSet::OMEGA.contains(mesh.tag(t)) {
                    for d in space.element_dofs(t).iter().take(space.n_local()).flatten() {
                        in_omega[*d] = true;
                    }
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut c: Vec<f64> =
                in_omega.iter().map(|&inside| if inside { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect();
            let mass = assemble_region_mass(space, RegionSet::OMEGA).map_err(|e| AnalysisError::Perturbation(e.to_string()))?;
            let norm = mass.matrix.bilinear(&c, &c).expect("sizes match").sqrt();
            if !(norm > 0.0) {
                return Err(AnalysisError::Perturbation("nodal noise has zero norm on the data set".into()));
            }
            let scale = spec.epsilon / norm;
            c.iter_mut().for_each(|v| *v *= scale);
            let certified_norm = mass.matrix.bilinear(&c, &c).expect("sizes match").sqrt();
            Ok(DataPerturbation { field: Field::Nodal(c), certified_norm })
        }
    }
}

impl DataPerturbation {
    pub fn zero() -> Self {
        DataPerturbation { field: Field::Zero, certified_norm: 0.0 }
    }

    /// `‖δq‖_{L²(ω)}` as measured on the construction mesh.
    pub fn certified_norm(&self) -> f64 {
        self.certified_norm
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.field, Field::Zero)
    }

    /// Value at barycentric point `l` of triangle `t` of `space`'s mesh.
    pub fn value_at(&self, space: &FeSpace<'_>, t: usize, l: [f64; 3]) -> f64 {
        match &self.field {
            Field::Zero => 0.0,
            Field::Oscillatory { amplitude, kappa } => {
                amplitude * oscillation(*kappa)(space.element_geometry(t).point(l))
            }
            Field::Nodal(c) => {
                let geo = space.element_geometry(t);
                space.eval_local(t, &geo, c, l).0
            }
        }
    }

    /// `(δq, φ_i)_{L²(ω)}` for the basis of `space`.
    pub fn load(&self, space: &FeSpace<'_>) -> Vec<f64> {
        match &self.field {
            Field::Zero => vec![0.0; space.n_dofs()],
            Field::Oscillatory { amplitude, kappa } => {
                let g = oscillation(*kappa);
                let a = *amplitude;
                assemble_load_region(space, &move |x| a * g(x), RegionSet::OMEGA).expect("omega is nonempty")
            }
            Field::Nodal(c) => {
                let mass = assemble_region_mass(space, RegionSet::OMEGA).expect("omega is nonempty");
                mass.matrix.matvec(c).expect("built on this space")
            }
        }
    }
}
