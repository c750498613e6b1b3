//! Exponents, harmonic test functions, rate fitting and the experiment drivers.

mod disk_quadrature;
mod exponents;
mod harmonic;
mod rates;
mod report;
mod study;
mod three_ball;

pub use disk_quadrature::{gauss_legendre, integrate_disk};
pub use exponents::{combined_exponent, optimal_alpha, StabilityExponents};
pub use harmonic::{
    harmonic_norm_closed, ln_gamma_half, ln_gamma_int, ln_norm_constant, ln_norm_sq, part_norm_closed,
    sobolev_norm_sq, HarmonicMonomial, Part,
};
pub use rates::{fit_rate, RateFit};
pub use three_ball::{three_ball_log_ratio, three_ball_ratio, SharpnessProbe};
pub use report::{format_sci, report_to_csv, report_to_json};
pub use study::{
    run_convergence_study, run_perturbation_study, run_stagnation_study, ColumnRate, ConvergenceReport,
    ConvergenceRow, HminPolicy, LevelDiagnostics, SensitivitySummary, StagnationSummary, StudyConfig, StudyKind,
    Threshold,
};
