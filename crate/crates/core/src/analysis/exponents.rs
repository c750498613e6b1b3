use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;

/// Hölder exponents of the three-ball estimate and of a method's two error
/// contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityExponents {
    pub alpha: f64,
    pub beta: f64,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub alpha_tilde: Option<f64>,
}

/// `β = ln(r3/r2)/ln(r2/r1)` and `α = β/(1+β) = ln(r3/r2)/ln(r3/r1)`.
pub fn optimal_alpha(r1: f64, r2: f64, r3: f64) -> Result<StabilityExponents, AnalysisError> {
    if !(r1 > 0.0 && r1 < r2 && r2 < r3 && r3.is_finite()) {
        return Err(AnalysisError::Ordering(r1, r2, r3));
    }
    let (l1, l2, l3) = (r1.ln(), r2.ln(), r3.ln());
    let beta = (l3 - l2) / (l2 - l1);
    let alpha = (l3 - l2) / (l3 - l1);
    Ok(StabilityExponents { alpha, beta, alpha1: None, alpha2: None, alpha_tilde: None })
}

fn unit_interval(name: &'static str, value: f64) -> Result<f64, AnalysisError> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(AnalysisError::ExponentRange { name, value })
    }
}

/// `α̃ = α₁/(1 + α₁ − α₂)`.
pub fn combined_exponent(alpha1: f64, alpha2: f64) -> Result<f64, AnalysisError> {
    let a1 = unit_interval("alpha1", alpha1)?;
    let a2 = unit_interval("alpha2", alpha2)?;
    Ok(a1 / (1.0 + a1 - a2))
}

impl StabilityExponents {
    pub fn with_rates(mut self, alpha1: f64, alpha2: f64) -> Result<Self, AnalysisError> {
        self.alpha_tilde = Some(combined_exponent(alpha1, alpha2)?);
        self.alpha1 = Some(alpha1);
        self.alpha2 = Some(alpha2);
        Ok(self)
    }

    /// Whether the rates lie in `[α, 1)` with at least one strictly above `α`,
    /// the situation in which `α̃ > α` follows.
    pub fn rates_exceed_optimal(&self) -> Option<bool> {
        let (a1, a2) = (self.alpha1?, self.alpha2?);
        let inside = |a: f64| a >= self.alpha && a < 1.0;
        Some(inside(a1) && inside(a2) && (a1 > self.alpha || a2 > self.alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        let e = optimal_alpha(0.25, 0.5, 1.0).unwrap();
        assert!((e.alpha - 0.5).abs() < 1e-15 && (e.beta - 1.0).abs() < 1e-15);
        assert!((optimal_alpha(1.0, 2.0, 4.0).unwrap().alpha - 0.5).abs() < 1e-15);
        let e = optimal_alpha(0.5, 0.75, 1.0).unwrap();
        // ln(4/3)/ln 2 and ln(4/3)/ln(3/2)
        assert!((e.alpha - 0.415_037_499_278_843_8).abs() < 1e-12);
        assert!((e.beta - 0.709_511_291_351_454_9).abs() < 1e-12);
        assert!((e.alpha - e.beta / (1.0 + e.beta)).abs() < 1e-15);
    }

    #[test]
    fn ordering_errors() {
        assert!(optimal_alpha(0.5, 0.25, 1.0).is_err());
        assert!(optimal_alpha(0.0, 0.25, 1.0).is_err());
        assert!(optimal_alpha(0.25, 1.0, 1.0).is_err());
    }

    #[test]
    fn combined_examples() {
        for a in [0.1, 0.37, 0.5, 0.93] {
            assert!((combined_exponent(a, a).unwrap() - a).abs() < 1e-15);
        }
        assert!((combined_exponent(0.6, 0.5).unwrap() - 0.6 / 1.1).abs() < 1e-15);
        assert!((combined_exponent(0.5, 0.7).unwrap() - 0.625).abs() < 1e-15);
        assert!(combined_exponent(1.0, 0.5).is_err());
        assert!(combined_exponent(0.5, 0.0).is_err());
    }

    #[test]
    fn exceeding_rates_are_flagged() {
        let e = optimal_alpha(0.25, 0.5, 1.0).unwrap().with_rates(0.6, 0.5).unwrap();
        assert_eq!(e.rates_exceed_optimal(), Some(true));
        assert!(e.alpha_tilde.unwrap() > e.alpha);
        let e = optimal_alpha(0.25, 0.5, 1.0).unwrap().with_rates(0.5, 0.5).unwrap();
        assert_eq!(e.rates_exceed_optimal(), Some(false));
        assert_eq!(optimal_alpha(0.25, 0.5, 1.0).unwrap().rates_exceed_optimal(), None);
    }

    #[test]
    fn alpha_is_continuous_in_the_radii() {
        let base = optimal_alpha(0.25, 0.5, 1.0).unwrap().alpha;
        for eps in [1e-3, 1e-5, 1e-7] {
            let a = optimal_alpha(0.25, 0.5, 1.0 + eps).unwrap().alpha;
            assert!((a - base).abs() < 2.0 * eps);
        }
    }
}
