use super::harmonic::{ln_norm_sq, HarmonicMonomial};
use crate::error::AnalysisError;
use crate::mesh::Geometry;

/// `ln R` with `R = ‖u‖_{B(r2)} / (‖u‖_{B(r1)}^a ‖u‖_{B(r3)}^{1-a})`, evaluated
/// from the closed-form norms so that large `n` cannot overflow.
pub fn three_ball_log_ratio(
    mono: &HarmonicMonomial,
    geometry: &Geometry,
    alpha_test: f64,
) -> Result<f64, AnalysisError> {
    if !(alpha_test > 0.0 && alpha_test < 1.0) {
        return Err(AnalysisError::ExponentRange { name: "alpha_test", value: alpha_test });
    }
    let [r1, r2, r3] = geometry.radii();
    if !(r1 > 0.0 && r1 < r2 && r2 < r3) {
        return Err(AnalysisError::Ordering(r1, r2, r3));
    }
    let l = |r: f64| ln_norm_sq(mono.n, mono.dim, r);
    Ok(0.5 * (l(r2) - alpha_test * l(r1) - (1.0 - alpha_test) * l(r3)))
}

pub fn three_ball_ratio(mono: &HarmonicMonomial, geometry: &Geometry, alpha_test: f64) -> Result<f64, AnalysisError> {
    three_ball_log_ratio(mono, geometry, alpha_test).map(f64::exp)
}

/// Ratios for `n = 1..=n_max` at one test exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessProbe {
    pub alpha_test: f64,
    pub log_ratios: Vec<f64>,
}

impl SharpnessProbe {
    pub fn run(geometry: &Geometry, dim: usize, alpha_test: f64, n_max: u32) -> Result<Self, AnalysisError> {
        let log_ratios = (1..=n_max)
            .map(|n| {
                let mut mono = HarmonicMonomial::new(n, super::Part::Re);
                mono.dim = dim;
                three_ball_log_ratio(&mono, geometry, alpha_test)
            })
            .collect::<Result<_, _>>()?;
        Ok(SharpnessProbe { alpha_test, log_ratios })
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.log_ratios.windows(2).all(|w| w[1] > w[0])
    }

    /// Smallest `n` whose ratio exceeds `threshold`.
    pub fn first_exceeding(&self, threshold: f64) -> Option<u32> {
        let lt = threshold.ln();
        self.log_ratios.iter().position(|&l| l > lt).map(|i| i as u32 + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{optimal_alpha, Part};

    #[test]
    fn equality_at_optimal_alpha() {
        for (r1, r2, r3) in [(0.25, 0.5, 1.0), (0.5, 0.75, 1.0), (0.1, 0.7, 3.0)] {
            let g = Geometry::disk(r1, r2, r3).unwrap();
            let a = optimal_alpha(r1, r2, r3).unwrap().alpha;
            for n in 1..=50 {
                for mono in [HarmonicMonomial::new(n, Part::Re), HarmonicMonomial::new(n, Part::Im).in_3d()] {
                    let r = three_ball_ratio(&mono, &g, a).unwrap();
                    assert!((r - 1.0).abs() < 1e-12, "n={n} r={r}");
                }
            }
        }
    }

    #[test]
    fn divergence_above_optimal_alpha() {
        let g = Geometry::default();
        let r = three_ball_ratio(&HarmonicMonomial::new(10, Part::Re), &g, 0.6).unwrap();
        assert!((r - 4.0).abs() < 1e-12);
        let r = three_ball_ratio(&HarmonicMonomial::new(80, Part::Re), &g, 0.6).unwrap();
        assert!((r / 65536.0 - 1.0).abs() < 1e-12);
        let p = SharpnessProbe::run(&g, 2, 0.55, 200).unwrap();
        assert!(p.is_strictly_increasing());
        assert!(p.first_exceeding(1e3).is_some());
    }

    #[test]
    fn rejects_bad_alpha() {
        let m = HarmonicMonomial::new(2, Part::Re);
        assert!(three_ball_ratio(&m, &Geometry::default(), 1.0).is_err());
    }
}
