//! The stabilized primal-dual unique-continuation solver and the Poisson
//! baseline.

mod perturbation;
mod poisson;
mod problem;
mod uc;

pub use perturbation::{make_perturbation, DataPerturbation, PerturbationMode, PerturbationSpec};
pub use poisson::solve_poisson;
pub use problem::{ExactSolution, TripleNormParts, UcDiagnostics, UcProblem, UcSolution};
pub use uc::{hminus1_residual, positivity_deviation, solve_uc, verify_positivity, UcSystem};

#[cfg(test)]
mod tests;
