use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Least-squares slope of `ln err` against `ln h`.
    pub slope: f64,
    /// `log(e_i/e_{i+1}) / log(h_i/h_{i+1})` for consecutive points.
    pub per_step_eoc: Vec<f64>,
}

pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit, AnalysisError> {
    if points.len() < 2 {
        return Err(AnalysisError::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    if let Some(&(h, e)) = points.iter().find(|&&(h, e)| !(h > 0.0 && e > 0.0 && h.is_finite() && e.is_finite())) {
        return Err(AnalysisError::Fit(format!("nonpositive value in point ({h:e}, {e:e})")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::Fit("all mesh sizes are equal".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let per_step_eoc = logs.windows(2).map(|w| (w[0].1 - w[1].1) / (w[0].0 - w[1].0)).collect();
    Ok(RateFit { slope: sxy / sxx, per_step_eoc })
}
