//! Harmonic monomials `Re/Im (x₁ + i x₂)^{n-1}` and their closed-form norms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fem::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    Re,
    Im,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HarmonicMonomial {
    /// Index: the function is `z^{n-1}`.
    pub n: u32,
    pub part: Part,
    pub dim: usize,
}

impl HarmonicMonomial {
    pub fn new(n: u32, part: Part) -> Self {
        assert!(n >= 1, "monomial index starts at 1");
        HarmonicMonomial { n, part, dim: 2 }
    }

    pub fn in_3d(mut self) -> Self {
        self.dim = 3;
        self
    }

    /// Power of `z`.
    pub fn degree(&self) -> u32 {
        self.n - 1
    }

    /// Value and gradient at a point of the plane (3D monomials do not depend
    /// on `x₃`).
    pub fn eval(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        let m = self.degree();
        let (mut wr, mut wi) = (1.0, 0.0); // z^m
        let (mut dr, mut di) = (0.0, 0.0); // z^{m-1}
        for step in 0..m {
            if step + 1 == m {
                dr = wr;
                di = wi;
            }
            let t = wr * x[0] - wi * x[1];
            wi = wr * x[1] + wi * x[0];
            wr = t;
        }
        // f' = m z^{m-1}; ∂₁ f = f', ∂₂ f = i f'
        let (fr, fi) = (m as f64 * dr, m as f64 * di);
        match self.part {
            Part::Re => (wr, [fr, -fi]),
            Part::Im => (wi, [fi, fr]),
        }
    }
}

impl ScalarField for HarmonicMonomial {
    fn value(&self, x: [f64; 2]) -> f64 {
        self.eval(x).0
    }
    fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        self.eval(x).1
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// `ln Γ(n)` for integer `n ≥ 1`.
pub fn ln_gamma_int(n: u32) -> f64 {
    ln_factorial(n - 1)
}

/// `ln Γ(n + 1/2)` via `Γ(n+1/2) = (2n)! √π / (4ⁿ n!)`.
pub fn ln_gamma_half(n: u32) -> f64 {
    ln_factorial(2 * n) + 0.5 * PI.ln() - f64::from(n) * 4f64.ln() - ln_factorial(n)
}

/// `ln c_n` of `‖z^{n-1}‖²_{L²(B(ρ))} = c_n ρ^{2n}` (2D) or `c_n ρ^{2n+1}` (3D).
pub fn ln_norm_constant(n: u32, dim: usize) -> f64 {
    match dim {
        2 => (PI / f64::from(n)).ln(),
        3 => {
            (2.0 * PI.powf(1.5)).ln() + ln_gamma_int(n) - (2.0 * f64::from(n) + 1.0).ln() - ln_gamma_half(n)
        }
        _ => panic!("dim must be 2 or 3"),
    }
}

/// `ln ‖z^{n-1}‖²_{L²(B(ρ))}` of the complex monomial.
pub fn ln_norm_sq(n: u32, dim: usize, rho: f64) -> f64 {
    let power = if dim == 2 { 2 * n } else { 2 * n + 1 };
    ln_norm_constant(n, dim) + f64::from(power) * rho.ln()
}

/// Squared `L²(B(ρ))` norm of the complex monomial `z^{n-1}`, i.e. `c_n ρ^{2n}`
/// in 2D. The `part` of `mono` is ignored; see [`part_norm_closed`].
pub fn harmonic_norm_closed(mono: &HarmonicMonomial, rho: f64) -> f64 {
    ln_norm_sq(mono.n, mono.dim, rho).exp()
}

/// Squared norm of the real-valued `Re`/`Im` part: half the complex value for
/// `n ≥ 2` (angular average of `cos²`/`sin²`), all of it for `n = 1`.
pub fn part_norm_closed(mono: &HarmonicMonomial, rho: f64) -> f64 {
    let full = harmonic_norm_closed(mono, rho);
    match (mono.n, mono.part) {
        (1, Part::Re) => full,
        (1, Part::Im) => 0.0,
        _ => 0.5 * full,
    }
}

/// Squared `H^s(B(ρ))` norm (2D) of the real part, with the seminorm of order
/// `j` taken as `Σ_{|a|=j} (j!/a!) |∂^a u|²`.
pub fn sobolev_norm_sq(mono: &HarmonicMonomial, s: u32, rho: f64) -> f64 {
    let m = mono.degree();
    let mut total = part_norm_closed(mono, rho);
    for j in 1..=s.min(m) {
        // all j-th derivatives are Re/Im of i^b f^{(j)}, f^{(j)} = m!/(m-j)! z^{m-j}
        let c = (ln_factorial(m) - ln_factorial(m - j)).exp();
        let p = f64::from(m - j + 1);
        total += 2f64.powi(j as i32 - 1) * c * c * PI * rho.powf(2.0 * p) / p;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let one = HarmonicMonomial::new(1, Part::Re);
        assert_eq!(one.eval([0.3, -2.0]), (1.0, [0.0, 0.0]));
        let sq = HarmonicMonomial::new(3, Part::Re);
        let (v, g) = sq.eval([1.0, 1.0]);
        assert!(v.abs() < 1e-15);
        assert_eq!(g, [2.0, -2.0]);
        let x1 = HarmonicMonomial::new(2, Part::Re);
        assert_eq!(x1.eval([0.7, 0.2]), (0.7, [1.0, 0.0]));
        let x2 = HarmonicMonomial::new(2, Part::Im);
        assert_eq!(x2.eval([0.7, 0.2]), (0.2, [0.0, 1.0]));
    }

    #[test]
    fn gradients_and_harmonicity_by_finite_differences() {
        let h = 1e-4;
        for n in 1..=8 {
            for part in [Part::Re, Part::Im] {
                let u = HarmonicMonomial::new(n, part);
                let x = [0.37, -0.52];
                let f = |p: [f64; 2]| u.eval(p).0;
                let g = u.eval(x).1;
                let gx = (f([x[0] + h, x[1]]) - f([x[0] - h, x[1]])) / (2.0 * h);
                let gy = (f([x[0], x[1] + h]) - f([x[0], x[1] - h])) / (2.0 * h);
                assert!((gx - g[0]).abs() < 1e-6 && (gy - g[1]).abs() < 1e-6);
                let lap = (f([x[0] + h, x[1]]) + f([x[0] - h, x[1]]) + f([x[0], x[1] + h]) + f([x[0], x[1] - h])
                    - 4.0 * f(x))
                    / (h * h);
                assert!(lap.abs() < 1e-5, "n={n} lap={lap}");
            }
        }
    }

    #[test]
    fn closed_norm_examples() {
        let m1 = HarmonicMonomial::new(1, Part::Re);
        assert!((harmonic_norm_closed(&m1, 1.0) - PI).abs() < 1e-14);
        let m2 = HarmonicMonomial::new(2, Part::Re);
        assert!((harmonic_norm_closed(&m2, 1.0) - PI / 2.0).abs() < 1e-14);
        let ball = harmonic_norm_closed(&m1.in_3d(), 2.0);
        assert!((ball - 32.0 * PI / 3.0).abs() < 1e-12);
        // Γ(3/2) = √π/2, Γ(5/2) = 3√π/4
        assert!((ln_gamma_half(1) - (PI.sqrt() / 2.0).ln()).abs() < 1e-14);
        assert!((ln_gamma_half(2) - (0.75 * PI.sqrt()).ln()).abs() < 1e-14);
        assert!((part_norm_closed(&m2, 1.0) - PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn three_d_constant_matches_direct_integral() {
        // 2π ∫₀^π ∫₀^1 (r sinθ)^{2n-1} r dr dθ by midpoint sums in θ
        for n in 1..=5u32 {
            let m = 20000;
            let dt = PI / m as f64;
            let theta: f64 = (0..m).map(|i| ((i as f64 + 0.5) * dt).sin().powi(2 * n as i32 - 1) * dt).sum();
            let direct = 2.0 * PI * theta / (2.0 * f64::from(n) + 1.0);
            let closed = ln_norm_constant(n, 3).exp();
            assert!((direct - closed).abs() < 1e-7 * closed, "n={n}");
        }
    }

    #[test]
    fn log_norm_is_convex_in_log_radius() {
        for n in 1..=10 {
            for dim in [2, 3] {
                let f = |t: f64| 0.5 * ln_norm_sq(n, dim, t.exp());
                for (s, t) in [(-3.0, 0.5), (-1.0, 1.0), (0.2, 2.0)] {
                    assert!(f(0.5 * (s + t)) <= 0.5 * (f(s) + f(t)) + 1e-12);
                }
            }
        }
    }
}
