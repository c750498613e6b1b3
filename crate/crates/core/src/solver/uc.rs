use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::perturbation::{make_perturbation, DataPerturbation};
use super::problem::{TripleNormParts, UcDiagnostics, UcProblem, UcSolution};
use crate::error::{FemError, Result};
use crate::exec::Exec;
use crate::fem::{
    assemble_load_region, assemble_region_mass, assemble_stiffness, stabilization_parts, FeSpace, FormMatrix,
    ScalarField, StabilizationParts,
};
use crate::mesh::{mesh_metrics, Mesh, RegionSet};
use crate::sparse::{compose_saddle, norm2, solve_direct, SparseMatrix, DEFAULT_REL_TOL};

/// Assembled blocks of the stabilized primal-dual system
///
/// ```text
/// [ S + M_ω   Bᵀ ] [u]   [(q̃, φ_i)_ω]
/// [ B        −A₀ ] [z] = [    0     ]
/// ```
///
/// with `u ∈ V_h`, `z ∈ V_{0h}` and `B` the stiffness with `V_{0h}` rows.
#[derive(Debug, Clone)]
pub struct UcSystem<'m> {
    pub primal: FeSpace<'m>,
    pub dual: FeSpace<'m>,
    pub stab_parts: StabilizationParts,
    pub stab: FormMatrix,
    pub mass_omega: FormMatrix,
    pub coupling: FormMatrix,
    pub a0: FormMatrix,
    pub h: f64,
    pub tikhonov_scale: f64,
    saddle: SparseMatrix,
}

impl<'m> UcSystem<'m> {
    /// Tikhonov scale is the global `h`, or `max(h, h_min)` when given.
    pub fn assemble(mesh: &'m Mesh, k: usize, h_min: Option<f64>, exec: Exec) -> Result<Self> {
        let primal = FeSpace::new(mesh, k, false)?.with_exec(exec);
        let dual = FeSpace::new(mesh, k, true)?.with_exec(exec);
        Self::from_spaces(primal, dual, h_min)
    }

    pub fn from_spaces(primal: FeSpace<'m>, dual: FeSpace<'m>, h_min: Option<f64>) -> Result<Self> {
        if primal.is_dirichlet() || !dual.is_dirichlet() {
            return Err(FemError::Constraint("primal space must be free and dual space constrained").into());
        }
        let h = mesh_metrics(primal.mesh()).h;
        let tikhonov_scale = h_min.map_or(h, |hm| h.max(hm));
        let stab_parts = stabilization_parts(&primal);
        let stab = stab_parts.combine(tikhonov_scale);
        let mass_omega = assemble_region_mass(&primal, RegionSet::OMEGA)?;
        let coupling = assemble_stiffness(&dual, &primal)?;
        let a0 = assemble_stiffness(&dual, &dual)?;
        let primal_block = stab.matrix.add_scaled(1.0, &mass_omega.matrix, 1.0)?;
        let saddle = compose_saddle(&primal_block, &coupling.matrix, &a0.matrix)?;
        Ok(UcSystem { primal, dual, stab_parts, stab, mass_omega, coupling, a0, h, tikhonov_scale, saddle })
    }

    pub fn saddle(&self) -> &SparseMatrix {
        &self.saddle
    }

    pub fn n_primal(&self) -> usize {
        self.primal.n_dofs()
    }

    pub fn n_dual(&self) -> usize {
        self.dual.n_dofs()
    }

    /// `(q, φ_i)_ω + (δq, φ_i)_ω`.
    pub fn data_load(&self, exact: &dyn ScalarField, perturbation: &DataPerturbation) -> Vec<f64> {
        let mut b = assemble_load_region(&self.primal, &|x| exact.value(x), RegionSet::OMEGA).expect("omega is nonempty");
        if !perturbation.is_zero() {
            for (bi, di) in b.iter_mut().zip(perturbation.load(&self.primal)) {
                *bi += di;
            }
        }
        b
    }

    /// Solves for a given primal right-hand side; returns `(u, z, relative residual)`.
    pub fn solve_load(&self, load: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
        if load.len() != self.n_primal() {
            return Err(FemError::Dimension { expected: self.n_primal(), got: load.len() }.into());
        }
        let mut rhs = load.to_vec();
        rhs.resize(self.n_primal() + self.n_dual(), 0.0);
        let x = solve_direct(&self.saddle, &rhs, DEFAULT_REL_TOL)?;
        let r = self.saddle.matvec(&x)?;
        let res: Vec<f64> = r.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        let denom = self.saddle.max_abs() * norm2(&x) + norm2(&rhs);
        let residual = if denom > 0.0 { norm2(&res) / denom } else { 0.0 };
        let z = x[self.n_primal()..].to_vec();
        let mut u = x;
        u.truncate(self.n_primal());
        Ok((u, z, residual))
    }

    pub fn solve(&self, problem: &UcProblem) -> Result<UcSolution> {
        let perturbation = make_perturbation(&problem.geometry, &problem.perturbation, &self.primal)?;
        let load = self.data_load(&problem.exact, &perturbation);
        let (u, z, solve_residual) = self.solve_load(&load)?;
        let triple_norm_parts = self.triple_norm_parts(&u, &z);
        Ok(UcSolution {
            u,
            z,
            diagnostics: UcDiagnostics {
                solve_residual,
                triple_norm_parts,
                h: self.h,
                tikhonov_scale: self.tikhonov_scale,
                n_primal: self.n_primal(),
                n_dual: self.n_dual(),
                perturbation_norm: perturbation.certified_norm(),
            },
        })
    }

    pub fn triple_norm_parts(&self, u: &[f64], z: &[f64]) -> TripleNormParts {
        TripleNormParts {
            stab: self.stab.matrix.bilinear(u, u).expect("primal vector"),
            dual: self.a0.matrix.bilinear(z, z).expect("dual vector"),
            data: self.mass_omega.matrix.bilinear(u, u).expect("primal vector"),
        }
    }

    /// `[u; −z]ᵀ K [u; z]` from the composed matrix, and `|||(u, z)|||²` from the blocks.
    pub fn positivity_pair(&self, u: &[f64], z: &[f64]) -> (f64, f64) {
        let mut x = u.to_vec();
        x.extend_from_slice(z);
        let mut y = u.to_vec();
        y.extend(z.iter().map(|v| -v));
        let lhs = self.saddle.bilinear(&y, &x).expect("saddle sized");
        let p = self.triple_norm_parts(u, z);
        (lhs, p.stab + p.dual + p.data)
    }

    /// Discrete dual norm of `v ↦ a(u, v)` on `V_{0h}`.
    pub fn hminus1_residual(&self, u: &[f64]) -> Result<f64> {
        riesz_norm(&self.a0.matrix, &self.coupling.matrix, u)
    }
}

fn riesz_norm(a0: &SparseMatrix, coupling: &SparseMatrix, u: &[f64]) -> Result<f64> {
    let r = coupling.matvec(u)?;
    let phi = solve_direct(a0, &r, DEFAULT_REL_TOL)?;
    Ok(a0.bilinear(&phi, &phi)?.max(0.0).sqrt())
}

/// Assembles and solves one unique-continuation problem on `mesh`.
pub fn solve_uc(problem: &UcProblem, mesh: &Mesh) -> Result<UcSolution> {
    problem.geometry.check()?;
    UcSystem::assemble(mesh, problem.k, problem.tikhonov_override, problem.exec)?.solve(problem)
}

/// `‖Δu_h‖_{H⁻¹}` surrogate: `√a(φ, φ)` with `φ ∈ V_{0h}` solving `a(φ, v) = a(u, v)`.
pub fn hminus1_residual(space0: &FeSpace<'_>, space: &FeSpace<'_>, u: &[f64]) -> Result<f64> {
    if !space0.is_dirichlet() {
        return Err(FemError::Constraint("test space must carry the Dirichlet constraint").into());
    }
    if u.len() != space.n_dofs() {
        return Err(FemError::Dimension { expected: space.n_dofs(), got: u.len() }.into());
    }
    let a0 = assemble_stiffness(space0, space0)?;
    let coupling = assemble_stiffness(space0, space)?;
    riesz_norm(&a0.matrix, &coupling.matrix, u)
}

/// Largest relative gap between `A_h[(u,z),(u,−z)]` and `|||(u,z)|||²` over
/// seeded random pairs.
pub fn verify_positivity(space: &FeSpace<'_>, space0: &FeSpace<'_>, trials: usize, seed: u64) -> Result<f64> {
    let system = UcSystem::from_spaces(space.clone(), space0.clone(), None)?;
    Ok(positivity_deviation(&system, trials, seed))
}

pub fn positivity_deviation(system: &UcSystem<'_>, trials: usize, seed: u64) -> f64 {
    let (np, nd) = (system.n_primal(), system.n_dual());
    system
        .primal
        .exec()
        .map_range(trials, |trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let u: Vec<f64> = (0..np).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z: Vec<f64> = (0..nd).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (lhs, rhs) = system.positivity_pair(&u, &z);
            relative_gap(lhs, rhs)
        })
        .into_iter()
        .fold(0.0, f64::max)
}

fn relative_gap(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

