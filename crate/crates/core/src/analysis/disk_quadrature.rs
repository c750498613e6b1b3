//! Integration over the exact disks `B(r_i)` on a tagged mesh.
//!
//! Elements with an edge on the circle are integrated over their curved
//! counterpart, parametrised from the opposite vertex, so the result carries
//! no polygonal-approximation error.

use std::f64::consts::PI;

use crate::error::AnalysisError;
use crate::mesh::{Geometry, Mesh, RegionSet};

/// Gauss–Legendre rule with `n` points on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((0.5 * (1.0 - x), 0.5 * w));
    }
    rule.reverse();
    rule
}

fn region_of_ring(ring: usize) -> RegionSet {
    match ring {
        0 => RegionSet::OMEGA,
        1 => RegionSet::TARGET,
        _ => RegionSet::ALL,
    }
}

/// `∫_{B(r_ring)} f dx` with curved treatment of the elements touching the
/// circle `|x| = r_ring`, using `points` Gauss points per direction.
pub fn integrate_disk(
    mesh: &Mesh,
    geometry: &Geometry,
    ring: usize,
    points: usize,
    f: &dyn Fn([f64; 2]) -> f64,
) -> Result<f64, AnalysisError> {
    if ring > 2 {
        return Err(AnalysisError::Config(format!("ring index {ring} out of range 0..=2")));
    }
    let rho = geometry.radii()[ring];
    let region = region_of_ring(ring);
    let gl = gauss_legendre(points);
    let on_circle = |x: [f64; 2]| (x[0].hypot(x[1]) - rho).abs() <= 1e-10 * rho;
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        if !region.contains(mesh.tag(t)) {
            continue;
        }
        let p = mesh.corners(t);
        let curved = (0..3).find(|&i| on_circle(p[(i + 1) % 3]) && on_circle(p[(i + 2) % 3]));
        let (c, a, b) = match curved {
            Some(i) => (p[i], p[(i + 1) % 3], p[(i + 2) % 3]),
            None => (p[0], p[1], p[2]),
        };
        let ta = a[1].atan2(a[0]);
        let mut dt = b[1].atan2(b[0]) - ta;
        if dt > PI {
            dt -= 2.0 * PI;
        } else if dt < -PI {
            dt += 2.0 * PI;
        }
        // x(s, τ) = c + s (P(τ) − c), |J| = s |det(P − c, P')|
        let edge = |tau: f64| -> ([f64; 2], [f64; 2]) {
            if curved.is_some() {
                let th = ta + tau * dt;
                let (sn, cs) = th.sin_cos();
                ([rho * cs, rho * sn], [-rho * dt * sn, rho * dt * cs])
            } else {
                ([a[0] + tau * (b[0] - a[0]), a[1] + tau * (b[1] - a[1])], [b[0] - a[0], b[1] - a[1]])
            }
        };
        let mut local = 0.0;
        for &(tau, wt) in &gl {
            let (q, dq) = edge(tau);
            let d = [q[0] - c[0], q[1] - c[1]];
            let jac = (d[0] * dq[1] - d[1] * dq[0]).abs();
            for &(s, ws) in &gl {
                local += wt * ws * s * jac * f([c[0] + s * d[0], c[1] + s * d[1]]);
            }
        }
        total += local;
    }
    Ok(total)
}
