//! Lagrange P1/P2 spaces on straight triangles and the assembled forms of the
//! stabilized primal-dual method.

mod assembly;
mod element;
mod norms;
mod quadrature;
mod space;

pub use assembly::{
    assemble_load_region, assemble_region_mass, assemble_stabilization, assemble_stiffness, interpolate_nodal,
    stabilization_parts, FormMatrix, FormRole, StabilizationParts,
};
pub use element::{ElementGeometry, Order};
pub use norms::{error_norms, fe_norms, triple_norm, ErrorNorms, FnField, ScalarField, ZeroField};
pub use quadrature::{gauss_legendre_3, QuadratureRule};
pub use space::{FeSpace, SpaceKind};
