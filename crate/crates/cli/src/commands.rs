//! Subcommand implementations. Each returns the text destined for stdout.

use std::fmt::Write;
use std::path::Path;

use ucfem::analysis::{
    combined_exponent, fit_rate, gauss_legendre, harmonic_norm_closed, integrate_disk, optimal_alpha,
    report_to_csv, report_to_json, run_convergence_study, run_perturbation_study, run_stagnation_study,
    three_ball_ratio, ConvergenceReport, HarmonicMonomial, Part,
};
use ucfem::fem::{error_norms, FeSpace, FnField, QuadratureRule};
use ucfem::mesh::{build_disk_mesh, mesh_metrics, validate, write_mesh, Geometry, RegionSet};
use ucfem::solver::{solve_poisson, verify_positivity, UcProblem, UcSystem};
use ucfem::sparse::{solve_direct, SparseMatrix};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Alpha,
    ThreeBall,
    Mesh,
    Poisson,
    Uc,
    Converge,
    Perturb,
    Stagnate,
    Selftest,
}

pub fn dispatch(cmd: Command, config: &RunConfig, out_dir: &Path) -> Result<String, CliError> {
    match cmd {
        Command::Alpha => alpha(config),
        Command::ThreeBall => three_ball(config),
        Command::Mesh => mesh(config, out_dir),
        Command::Poisson => poisson(config),
        Command::Uc => uc(config),
        Command::Converge => study(config, out_dir, run_convergence_study),
        Command::Perturb => study(config, out_dir, run_perturbation_study),
        Command::Stagnate => study(config, out_dir, run_stagnation_study),
        Command::Selftest => selftest(),
    }
}

fn alpha(c: &RunConfig) -> Result<String, CliError> {
    let e = optimal_alpha(c.r1, c.r2, c.r3).map_err(ucfem::Error::from)?;
    let mut out = format!("alpha={:?} beta={:?}", e.alpha, e.beta);
    if let (Some(a1), Some(a2)) = (c.alpha1, c.alpha2) {
        let e = e.with_rates(a1, a2).map_err(ucfem::Error::from)?;
        let _ = write!(
            out,
            " alpha_tilde={:?} exceeds_optimal={}",
            e.alpha_tilde.expect("rates set"),
            e.rates_exceed_optimal().expect("rates set")
        );
    }
    out.push('\n');
    Ok(out)
}

fn three_ball(c: &RunConfig) -> Result<String, CliError> {
    let g = Geometry { r1: c.r1, r2: c.r2, r3: c.r3, dim: c.three_ball_dim };
    let mut out = String::from("n");
    for a in &c.three_ball_alphas {
        let _ = write!(out, ",ratio@{a:?}");
    }
    out.push('\n');
    for n in 1..=c.three_ball_n_max {
        let mut mono = HarmonicMonomial::new(n, Part::Re);
        mono.dim = c.three_ball_dim;
        let _ = write!(out, "{n}");
        for &a in &c.three_ball_alphas {
            let r = three_ball_ratio(&mono, &g, a).map_err(ucfem::Error::from)?;
            let _ = write!(out, ",{r:.12}");
        }
        out.push('\n');
    }
    Ok(out)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn mesh(c: &RunConfig, out_dir: &Path) -> Result<String, CliError> {
    let m = build_disk_mesh(&c.geometry(), c.sectors, c.level).map_err(ucfem::Error::from)?;
    let name = format!("mesh_level{}.txt", c.level);
    write_file(out_dir, &name, &write_mesh(&m))?;
    let metrics = mesh_metrics(&m);
    let clean = validate(&m).is_clean();
    Ok(format!(
        "level={} vertices={} triangles={} h={:.6e} shape_ratio={:.6} valid={} file={}\n",
        c.level,
        m.n_vertices(),
        m.n_triangles(),
        metrics.h,
        metrics.shape_ratio,
        clean,
        out_dir.join(name).display()
    ))
}

fn poisson(c: &RunConfig) -> Result<String, CliError> {
    let m = build_disk_mesh(&c.geometry(), c.sectors, c.level).map_err(ucfem::Error::from)?;
    let v0 = FeSpace::new(&m, c.k, true).map_err(ucfem::Error::from)?.with_exec(c.exec);
    let r3 = c.r3;
    let u = solve_poisson(&v0, &|_| 4.0)?;
    let exact = FnField(move |x: [f64; 2]| r3 * r3 - x[0] * x[0] - x[1] * x[1], |x: [f64; 2]| [-2.0 * x[0], -2.0 * x[1]]);
    let e = error_norms(&v0, &u, &exact, RegionSet::ALL).map_err(ucfem::Error::from)?;
    Ok(format!(
        "level={} h={:.6e} dofs={} err_l2={:.6e} err_h1semi={:.6e}\n",
        c.level,
        mesh_metrics(&m).h,
        v0.n_dofs(),
        e.l2,
        e.h1_semi
    ))
}

fn uc(c: &RunConfig) -> Result<String, CliError> {
    let m = build_disk_mesh(&c.geometry(), c.sectors, c.level).map_err(ucfem::Error::from)?;
    let study = c.study();
    let h_min = study.h_min().filter(|_| c.epsilon > 0.0);
    let system = UcSystem::assemble(&m, c.k, h_min, c.exec)?;
    let problem = UcProblem {
        geometry: c.geometry(),
        k: c.k,
        exact: c.exact(),
        perturbation: c.perturbation(),
        tikhonov_override: h_min,
        exec: c.exec,
    };
    let sol = system.solve(&problem)?;
    let err = error_norms(&system.primal, &sol.u, &problem.exact, RegionSet::TARGET).map_err(ucfem::Error::from)?;
    let d = &sol.diagnostics;
    Ok(format!(
        "level={} h={:.6e} n_primal={} n_dual={} tikhonov_scale={:.6e} err_l2_B={:.6e} err_h1semi_B={:.6e} triple_norm={:.6e} perturbation_norm={:.6e} solve_residual={:.3e}\n",
        c.level,
        d.h,
        d.n_primal,
        d.n_dual,
        d.tikhonov_scale,
        err.l2,
        err.h1_semi,
        d.triple_norm_parts.total(),
        d.perturbation_norm,
        d.solve_residual
    ))
}

/// JSON document written next to the CSV: the configuration echo (parseable
/// by `parse_config`) and the full report.
pub fn report_document(config: &RunConfig, report: &ConvergenceReport) -> String {
    let report: serde_json::Value = serde_json::from_str(&report_to_json(report)).expect("valid json");
    let doc = serde_json::json!({ "run_config": config.to_text(), "report": report });
    serde_json::to_string_pretty(&doc).expect("serialisable") + "\n"
}

fn study(
    c: &RunConfig,
    out_dir: &Path,
    run: fn(&ucfem::analysis::StudyConfig) -> ucfem::Result<ConvergenceReport>,
) -> Result<String, CliError> {
    let report = run(&c.study())?;
    write_file(out_dir, &c.csv, &report_to_csv(&report))?;
    write_file(out_dir, &c.json, &report_document(c, &report))?;
    let mut out = report_to_csv(&report);
    for r in &report.fitted_rates {
        let _ = writeln!(out, "rate {} = {:.4}", r.column, r.fit.slope);
    }
    if let Some(s) = &report.sensitivity {
        let _ = writeln!(out, "sensitivity max/min = {:.4}", s.max_over_min);
    }
    if let Some(s) = &report.stagnation {
        let _ = writeln!(
            out,
            "h_min = {} crossing_level = {} plateau/reference = {:.4}",
            s.h_min.map_or("none".into(), |v| format!("{v:.6e}")),
            s.crossing_level.map_or("none".into(), |v| v.to_string()),
            s.plateau_over_reference
        );
    }
    Ok(out)
}

type Check = (&'static str, fn() -> Result<(), String>);

fn check_positivity() -> Result<(), String> {
    let g = Geometry::default();
    for level in 1..=2 {
        let m = build_disk_mesh(&g, 8, level).map_err(|e| e.to_string())?;
        for k in [1, 2] {
            let v = FeSpace::new(&m, k, false).map_err(|e| e.to_string())?;
            let v0 = FeSpace::new(&m, k, true).map_err(|e| e.to_string())?;
            let dev = verify_positivity(&v, &v0, 20, 1).map_err(|e| e.to_string())?;
            if dev > 1e-12 {
                return Err(format!("level {level} k {k}: deviation {dev:e}"));
            }
        }
    }
    Ok(())
}

fn check_three_ball_equality() -> Result<(), String> {
    let g = Geometry::default();
    let a = optimal_alpha(g.r1, g.r2, g.r3).map_err(|e| e.to_string())?.alpha;
    for n in 1..=50 {
        for mono in [HarmonicMonomial::new(n, Part::Re), HarmonicMonomial::new(n, Part::Re).in_3d()] {
            let r = three_ball_ratio(&mono, &g, a).map_err(|e| e.to_string())?;
            if (r - 1.0).abs() > 1e-12 {
                return Err(format!("n={n} dim={} ratio={r}", mono.dim));
            }
        }
    }
    Ok(())
}

fn check_quadrature() -> Result<(), String> {
    let q = QuadratureRule::triangle_degree4();
    // ∫_T x^a y^b over the reference triangle = a! b! / (a+b+2)!
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    for a in 0..=4u32 {
        for b in 0..=(4 - a) {
            let approx: f64 = q.points.iter().zip(&q.weights).map(|(l, w)| w * l[1].powi(a as i32) * l[2].powi(b as i32)).sum();
            let exact = fact(a) * fact(b) / fact(a + b + 2);
            if (approx - exact).abs() > 1e-15 {
                return Err(format!("x^{a} y^{b}: {approx} vs {exact}"));
            }
        }
    }
    for n in 1..=8 {
        let r = gauss_legendre(n);
        for d in 0..2 * n {
            let v: f64 = r.iter().map(|&(x, w)| w * x.powi(d as i32)).sum();
            if (v - 1.0 / (d as f64 + 1.0)).abs() > 1e-14 {
                return Err(format!("Gauss-Legendre n={n} degree {d}"));
            }
        }
    }
    Ok(())
}

fn check_meshes() -> Result<(), String> {
    let g = Geometry::default();
    for level in 0..=3 {
        let m = build_disk_mesh(&g, 8, level).map_err(|e| e.to_string())?;
        let d = validate(&m);
        if !d.is_clean() {
            return Err(format!("level {level}: {:?}", d.violations.first()));
        }
    }
    Ok(())
}

fn check_direct_solver() -> Result<(), String> {
    let k = SparseMatrix::from_dense(&[vec![2.0, 3.0], vec![3.0, -5.0]]).map_err(|e| e.to_string())?;
    let x = solve_direct(&k, &[1.0, 0.0], 1e-12).map_err(|e| e.to_string())?;
    if (x[0] - 5.0 / 19.0).abs() > 1e-15 || (x[1] - 3.0 / 19.0).abs() > 1e-15 {
        return Err(format!("{x:?}"));
    }
    Ok(())
}

fn check_exponents() -> Result<(), String> {
    let alpha = 0.5;
    for i in 0..10 {
        for j in 0..10 {
            let (a1, a2) = (alpha + 0.049 * i as f64, alpha + 0.049 * j as f64);
            if i + j == 0 {
                continue;
            }
            let t = combined_exponent(a1, a2).map_err(|e| e.to_string())?;
            if t <= alpha {
                return Err(format!("({a1}, {a2}) -> {t}"));
            }
        }
    }
    let f = fit_rate(&[(1.0, 1.0), (0.5, 0.25), (0.25, 0.0625)]).map_err(|e| e.to_string())?;
    if (f.slope - 2.0).abs() > 1e-12 {
        return Err(format!("fit slope {}", f.slope));
    }
    Ok(())
}

fn check_disk_norms() -> Result<(), String> {
    let g = Geometry::default();
    let m = build_disk_mesh(&g, 8, 2).map_err(|e| e.to_string())?;
    for n in 1..=6 {
        let re = HarmonicMonomial::new(n, Part::Re);
        let im = HarmonicMonomial::new(n, Part::Im);
        for (ring, rho) in g.radii().into_iter().enumerate() {
            let q = integrate_disk(&m, &g, ring, 8, &|x| re.eval(x).0.powi(2) + im.eval(x).0.powi(2))
                .map_err(|e| e.to_string())?;
            let closed = harmonic_norm_closed(&re, rho);
            if (q / closed - 1.0).abs() > 1e-8 {
                return Err(format!("n={n} rho={rho}: {q} vs {closed}"));
            }
        }
    }
    Ok(())
}

pub const CHECKS: [Check; 7] = [
    ("positivity", check_positivity),
    ("three_ball_equality", check_three_ball_equality),
    ("quadrature_exactness", check_quadrature),
    ("mesh_invariants", check_meshes),
    ("direct_solver", check_direct_solver),
    ("exponent_arithmetic", check_exponents),
    ("disk_norm_cross_check", check_disk_norms),
];

fn selftest() -> Result<String, CliError> {
    let mut out = String::new();
    let mut failed = 0;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => {
                let _ = writeln!(out, "ok {name}");
            }
            Err(msg) => {
                failed += 1;
                let _ = writeln!(out, "FAIL {name}: {msg}");
            }
        }
    }
    let _ = writeln!(out, "invariants: {} passed, {failed} failed", CHECKS.len() - failed);
    if failed > 0 {
        print!("{out}");
        return Err(CliError::Check(format!("{failed} self-test invariant(s) failed")));
    }
    Ok(out)
}
