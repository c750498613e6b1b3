//! Primal-dual stabilized finite elements for the unique continuation
//! problem of the Laplace equation on concentric disks.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`] builds and refines triangulations of the disk aligned with the
//!   data set `ω = B(r1)`, the target set `B = B(r2)` and the domain `Ω = B(r3)`.
//! * [`fem`] provides P1/P2 Lagrange spaces, quadrature and the assembled forms.
//! * [`sparse`] stores the assembled matrices and factorizes the saddle system.
//! * [`solver`] solves the stabilized primal-dual problem and the Poisson baseline.
//! * [`analysis`] holds the closed-form three-ball laboratory, rate fitting and
//!   the convergence, perturbation and stagnation studies.
//!
//! Element loops, per-level solves and batched checks run on rayon when the
//! `parallel` feature is enabled (the default). Every parallel path merges its
//! results in a fixed order, so outputs are bit-identical to the sequential path.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the local element matrices.
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod error;
pub mod exec;
pub mod fem;
pub mod mesh;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use exec::Exec;
