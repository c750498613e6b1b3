use crate::error::{FemError, Result};
use crate::fem::{assemble_load_region, assemble_stiffness, FeSpace};
use crate::mesh::RegionSet;
use crate::sparse::{solve_direct, DEFAULT_REL_TOL};

/// Galerkin solution of `−Δu = f` in `Ω`, `u = 0` on the boundary polygon.
pub fn solve_poisson(space0: &FeSpace<'_>, f: &(dyn Fn([f64; 2]) -> f64 + Sync)) -> Result<Vec<f64>> {
    if !space0.is_dirichlet() {
        return Err(FemError::Constraint("Poisson space must carry the Dirichlet constraint").into());
    }
    let a = assemble_stiffness(space0, space0)?;
    let b = assemble_load_region(space0, f, RegionSet::ALL)?;
    Ok(solve_direct(&a.matrix, &b, DEFAULT_REL_TOL)?)
}
