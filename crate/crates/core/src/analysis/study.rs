//! Refinement studies: convergence, perturbation sensitivity and Tikhonov
//! stagnation.

use serde::{Deserialize, Serialize};

use super::exponents::{optimal_alpha, StabilityExponents};
use super::rates::{fit_rate, RateFit};
use crate::error::{AnalysisError, Result};
use crate::exec::Exec;
use crate::fem::{error_norms, fe_norms, interpolate_nodal, ScalarField};
use crate::mesh::{build_disk_mesh, Geometry, RegionSet};
use crate::solver::{ExactSolution, PerturbationMode, PerturbationSpec, UcProblem, UcSystem};

/// How the Tikhonov floor `h_min` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HminPolicy {
    Off,
    /// `(‖δq‖_{L²(ω)} / ‖u‖_{H^{k+1}(Ω)})^{1/k}` from the exact solution.
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub geometry: Geometry,
    pub k: usize,
    pub sectors: usize,
    pub levels: Vec<usize>,
    pub exact: ExactSolution,
    pub perturbation: PerturbationSpec,
    pub hmin: HminPolicy,
    /// Inclusive level range used by the rate fits.
    pub rate_window: (usize, usize),
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            geometry: Geometry::default(),
            k: 1,
            sectors: 8,
            levels: (1..=5).collect(),
            exact: ExactSolution::Monomial(super::HarmonicMonomial::new(3, super::Part::Re)),
            perturbation: PerturbationSpec::default(),
            hmin: HminPolicy::Off,
            rate_window: (2, 5),
            exec: Exec::default(),
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.check()?;
        if self.geometry.dim != 2 {
            return Err(AnalysisError::Config("finite element studies need dim = 2".into()).into());
        }
        if !(self.k == 1 || self.k == 2) {
            return Err(crate::error::FemError::UnsupportedOrder(self.k).into());
        }
        if self.levels.is_empty() {
            return Err(AnalysisError::Config("no levels requested".into()).into());
        }
        if self.levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(AnalysisError::Config("levels must be strictly increasing".into()).into());
        }
        if self.rate_window.0 > self.rate_window.1 {
            return Err(AnalysisError::Config("rate window is empty".into()).into());
        }
        if let HminPolicy::Value(v) = self.hmin {
            if !(v > 0.0 && v.is_finite()) {
                return Err(AnalysisError::Config(format!("hmin = {v} must be positive")).into());
            }
        }
        let eps = self.perturbation.epsilon;
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(AnalysisError::Config(format!("epsilon = {eps} must be >= 0")).into());
        }
        Ok(())
    }

    /// `ε` actually applied to the data.
    pub fn effective_epsilon(&self) -> f64 {
        if self.perturbation.mode == PerturbationMode::None {
            0.0
        } else {
            self.perturbation.epsilon
        }
    }

    /// Floor of the Tikhonov scale; `None` leaves the plain `h`.
    pub fn h_min(&self) -> Option<f64> {
        match self.hmin {
            HminPolicy::Off => None,
            HminPolicy::Value(v) => Some(v),
            HminPolicy::Auto => {
                let eps = self.effective_epsilon();
                let u = self.exact.sobolev_norm(self.k as u32 + 1, self.geometry.r3);
                (eps > 0.0 && u > 0.0).then(|| (eps / u).powf(1.0 / self.k as f64))
            }
        }
    }
}

/// One refinement level; field names are the CSV column names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub n_dofs_primal: usize,
    pub n_dofs_dual: usize,
    #[serde(rename = "err_l2_B")]
    pub err_l2_b: f64,
    pub err_l2_omega: f64,
    #[serde(rename = "err_h1semi_B")]
    pub err_h1semi_b: f64,
    pub triple_norm: f64,
    pub residual_hminus1: f64,
    #[serde(rename = "l2_Omega_of_uh")]
    pub l2_omega_of_uh: f64,
}

impl ConvergenceRow {
    pub const COLUMNS: [&'static str; 10] = [
        "level",
        "h",
        "n_dofs_primal",
        "n_dofs_dual",
        "err_l2_B",
        "err_l2_omega",
        "err_h1semi_B",
        "triple_norm",
        "residual_hminus1",
        "l2_Omega_of_uh",
    ];

    /// The error columns that receive a fitted rate.
    pub const RATE_COLUMNS: [&'static str; 5] =
        ["err_l2_B", "err_l2_omega", "err_h1semi_B", "triple_norm", "residual_hminus1"];

    pub fn column(&self, name: &str) -> Option<f64> {
        Some(match name {
            "h" => self.h,
            "err_l2_B" => self.err_l2_b,
            "err_l2_omega" => self.err_l2_omega,
            "err_h1semi_B" => self.err_h1semi_b,
            "triple_norm" => self.triple_norm,
            "residual_hminus1" => self.residual_hminus1,
            "l2_Omega_of_uh" => self.l2_omega_of_uh,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDiagnostics {
    pub level: usize,
    pub solve_residual: f64,
    pub tikhonov_scale: f64,
    pub perturbation_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnRate {
    pub column: String,
    pub fit: RateFit,
}

/// A regression constant together with where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub name: String,
    pub value: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivitySummary {
    /// `err_l2_B · h^{(1−α)k} / ε` per level.
    pub normalized: Vec<f64>,
    pub max_over_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagnationSummary {
    pub h_min: Option<f64>,
    pub u_norm_hk1: f64,
    /// `‖δq‖^α ‖u‖_{H^{k+1}}^{1−α}`.
    pub plateau_reference: f64,
    /// First level with `h < h_min`.
    pub crossing_level: Option<usize>,
    pub finest_over_crossing: Option<f64>,
    /// Finest-level `err_l2_B` divided by the reference.
    pub plateau_over_reference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Convergence,
    Perturbation,
    Stagnation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub kind: StudyKind,
    pub config: StudyConfig,
    pub exponents: StabilityExponents,
    pub rows: Vec<ConvergenceRow>,
    pub diagnostics: Vec<LevelDiagnostics>,
    /// Least-squares slopes over `config.rate_window`; columns that are not
    /// strictly positive in the window are omitted.
    pub fitted_rates: Vec<ColumnRate>,
    /// Per-step EOC for every rate column over all rows.
    pub eoc: Vec<ColumnRate>,
    pub sensitivity: Option<SensitivitySummary>,
    pub stagnation: Option<StagnationSummary>,
    pub thresholds: Vec<Threshold>,
}

impl ConvergenceReport {
    pub fn rate(&self, column: &str) -> Option<f64> {
        self.fitted_rates.iter().find(|r| r.column == column).map(|r| r.fit.slope)
    }

    pub fn column(&self, column: &str) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.column(column)).collect()
    }
}

/// Regression constants checked by the acceptance suite.
pub mod frozen {
    pub const L2_B_MIN_RATE: f64 = 0.4;
    pub const TRIPLE_RATE_RANGE: (f64, f64) = (0.7, 1.3);
    pub const HMINUS1_RATE_RANGE: (f64, f64) = (0.7, 1.3);
    pub const SENSITIVITY_MAX_OVER_MIN: f64 = 10.0;
    pub const STAGNATION_FACTOR: f64 = 3.0;
    pub const PLATEAU_DECADES: f64 = 1.0;
}

fn thresholds_for(kind: StudyKind) -> Vec<Threshold> {
    let t = |name: &str, value: f64, provenance: &str| Threshold {
        name: name.into(),
        value,
        provenance: provenance.into(),
    };
    match kind {
        StudyKind::Convergence => vec![
            t("err_l2_B_min_rate", frozen::L2_B_MIN_RATE, "target alpha*k = 0.5 less 0.1 fitting slack"),
            t("triple_norm_rate_min", frozen::TRIPLE_RATE_RANGE.0, "rate k = 1 minus 0.3"),
            t("triple_norm_rate_max", frozen::TRIPLE_RATE_RANGE.1, "rate k = 1 plus 0.3"),
            t("residual_hminus1_rate_min", frozen::HMINUS1_RATE_RANGE.0, "rate k = 1 minus 0.3"),
            t("residual_hminus1_rate_max", frozen::HMINUS1_RATE_RANGE.1, "rate k = 1 plus 0.3"),
        ],
        StudyKind::Perturbation => vec![t(
            "normalized_sensitivity_max_over_min",
            frozen::SENSITIVITY_MAX_OVER_MIN,
            "frozen at first verified run (measured 7.2 for eps = 1e-3, levels 1-5)",
        )],
        StudyKind::Stagnation => vec![
            t("finest_over_crossing_max", frozen::STAGNATION_FACTOR, "no blow-up below h_min"),
            t("plateau_decades", frozen::PLATEAU_DECADES, "plateau within one decade of the reference"),
        ],
    }
}

fn solve_level(config: &StudyConfig, level: usize, h_min: Option<f64>) -> Result<(ConvergenceRow, LevelDiagnostics)> {
    let mesh = build_disk_mesh(&config.geometry, config.sectors, level)?;
    let system = UcSystem::assemble(&mesh, config.k, h_min, config.exec)?;
    let problem = UcProblem {
        geometry: config.geometry,
        k: config.k,
        exact: config.exact,
        perturbation: config.perturbation,
        tikhonov_override: h_min,
        exec: config.exec,
    };
    let sol = system.solve(&problem)?;
    let exact = &config.exact;
    let on_b = error_norms(&system.primal, &sol.u, exact, RegionSet::TARGET)?;
    let on_omega = error_norms(&system.primal, &sol.u, exact, RegionSet::OMEGA)?;
    let ui = interpolate_nodal(&system.primal, &|x| exact.value(x));
    let diff: Vec<f64> = ui.iter().zip(&sol.u).map(|(a, b)| a - b).collect();
    let row = ConvergenceRow {
        level,
        h: system.h,
        n_dofs_primal: system.n_primal(),
        n_dofs_dual: system.n_dual(),
        err_l2_b: on_b.l2,
        err_l2_omega: on_omega.l2,
        err_h1semi_b: on_b.h1_semi,
        triple_norm: system.triple_norm_parts(&diff, &sol.z).total(),
        residual_hminus1: system.hminus1_residual(&sol.u)?,
        l2_omega_of_uh: fe_norms(&system.primal, &sol.u, RegionSet::ALL)?.l2,
    };
    let diag = LevelDiagnostics {
        level,
        solve_residual: sol.diagnostics.solve_residual,
        tikhonov_scale: sol.diagnostics.tikhonov_scale,
        perturbation_norm: sol.diagnostics.perturbation_norm,
    };
    Ok((row, diag))
}

fn run_levels(config: &StudyConfig, kind: StudyKind, h_min: Option<f64>) -> Result<ConvergenceReport> {
    config.validate()?;
    let g = &config.geometry;
    let exponents = optimal_alpha(g.r1, g.r2, g.r3)?;
    let results = config.exec.map_slice(&config.levels, |&level| solve_level(config, level, h_min));
    let (rows, diagnostics): (Vec<_>, Vec<_>) = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    let (lo, hi) = config.rate_window;
    let mut fitted_rates = Vec::new();
    let mut eoc = Vec::new();
    for column in ConvergenceRow::RATE_COLUMNS {
        let windowed: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| (lo..=hi).contains(&r.level))
            .map(|r| (r.h, r.column(column).expect("known column")))
            .collect();
        if let Ok(fit) = fit_rate(&windowed) {
            fitted_rates.push(ColumnRate { column: column.to_string(), fit });
        }
        let all: Vec<(f64, f64)> = rows.iter().map(|r| (r.h, r.column(column).expect("known column"))).collect();
        if let Ok(fit) = fit_rate(&all) {
            eoc.push(ColumnRate { column: column.to_string(), fit });
        }
    }
    Ok(ConvergenceReport {
        kind,
        config: config.clone(),
        exponents,
        rows,
        diagnostics,
        fitted_rates,
        eoc,
        sensitivity: None,
        stagnation: None,
        thresholds: thresholds_for(kind),
    })
}

/// Solves every level with the plain Tikhonov scale `h` and fits rates.
pub fn run_convergence_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    run_levels(config, StudyKind::Convergence, None)
}

/// Records `err_l2_B · h^{(1−α)k} / ε` per level for perturbed data.
pub fn run_perturbation_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    let mut report = run_levels(config, StudyKind::Perturbation, None)?;
    let eps = config.effective_epsilon();
    if eps > 0.0 {
        let p = (1.0 - report.exponents.alpha) * config.k as f64;
        let normalized: Vec<f64> = report.rows.iter().map(|r| r.err_l2_b * r.h.powf(p) / eps).collect();
        let max = normalized.iter().copied().fold(f64::MIN, f64::max);
        let min = normalized.iter().copied().fold(f64::MAX, f64::min);
        report.sensitivity = Some(SensitivitySummary { normalized, max_over_min: max / min });
    }
    Ok(report)
}

/// Runs with the Tikhonov scale `max(h, h_min)` and summarises the plateau.
pub fn run_stagnation_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    let h_min = config.h_min();
    let mut report = run_levels(config, StudyKind::Stagnation, h_min)?;
    let alpha = report.exponents.alpha;
    let u_norm_hk1 = config.exact.sobolev_norm(config.k as u32 + 1, config.geometry.r3);
    let eps = config.effective_epsilon();
    let plateau_reference = eps.powf(alpha) * u_norm_hk1.powf(1.0 - alpha);
    let crossing = h_min.and_then(|hm| report.rows.iter().position(|r| r.h < hm));
    let finest = report.rows.last().expect("validated nonempty").err_l2_b;
    report.stagnation = Some(StagnationSummary {
        h_min,
        u_norm_hk1,
        plateau_reference,
        crossing_level: crossing.map(|i| report.rows[i].level),
        finest_over_crossing: crossing.map(|i| finest / report.rows[i].err_l2_b),
        plateau_over_reference: if plateau_reference > 0.0 { finest / plateau_reference } else { f64::NAN },
    });
    Ok(report)
}
