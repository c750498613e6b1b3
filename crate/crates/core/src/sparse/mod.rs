//! Compressed sparse row storage and a direct LDLᵀ solver for symmetric
//! (quasi-definite) saddle systems.

mod ldlt;
mod matrix;
mod ordering;

pub use ldlt::{solve_direct, Ldlt, DEFAULT_REL_TOL};
pub use matrix::{compose_saddle, dot, norm2, SparseMatrix, Triplet};
pub use ordering::nested_dissection;
