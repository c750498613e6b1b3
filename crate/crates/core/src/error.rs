use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("sectors = {0}: need an even number >= 6")]
    Sectors(usize),
    #[error("mesh I/O: {0}")]
    Format(String),
    #[error("invalid mesh: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("unsupported polynomial order {0} (expected 1 or 2)")]
    UnsupportedOrder(usize),
    #[error("spaces live on different meshes or orders")]
    SpaceMismatch,
    #[error("region set is empty")]
    EmptyRegion,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("space constraint: {0}")]
    Constraint(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("singular matrix: zero or non-finite pivot at row {index}")]
    Singular { index: usize },
    #[error("residual {achieved:.3e} exceeds tolerance {tolerance:.3e}")]
    Residual { achieved: f64, tolerance: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("radii must satisfy 0 < r1 < r2 < r3 (got {0}, {1}, {2})")]
    Ordering(f64, f64, f64),
    #[error("exponent {name} = {value} outside (0, 1)")]
    ExponentRange { name: &'static str, value: f64 },
    #[error("rate fit: {0}")]
    Fit(String),
    #[error("invalid study configuration: {0}")]
    Config(String),
    #[error("perturbation: {0}")]
    Perturbation(String),
}

/// Top-level error.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}
