//! End-to-end checks across modules: mesh I/O, the saddle solve and reports.

use ucfem::analysis::{report_to_csv, report_to_json, run_convergence_study, HarmonicMonomial, Part, StudyConfig};
use ucfem::fem::{error_norms, interpolate_nodal, FeSpace};
use ucfem::mesh::{build_disk_mesh, mesh_metrics, read_mesh, write_mesh, Geometry, RegionSet};
use ucfem::solver::{solve_uc, ExactSolution, PerturbationSpec, UcProblem, UcSystem};
use ucfem::Exec;

#[test]
fn mesh_file_round_trip_gives_identical_solve() {
    let g = Geometry::default();
    let m = build_disk_mesh(&g, 8, 2).unwrap();
    let m2 = read_mesh(&write_mesh(&m)).unwrap();
    let p = UcProblem::new(g, 1, ExactSolution::Monomial(HarmonicMonomial::new(3, Part::Re)));
    let a = solve_uc(&p, &m).unwrap();
    let b = solve_uc(&p, &m2).unwrap();
    assert_eq!(a.u, b.u);
    assert_eq!(a.z, b.z);
}

#[test]
fn harmonic_data_in_omega_is_fitted_better_than_in_b() {
    // The data term pins u_h on ω; away from ω only stability helps.
    let g = Geometry::default();
    let m = build_disk_mesh(&g, 8, 3).unwrap();
    let exact = ExactSolution::Affine([0.3, 1.0, -0.5]);
    let sol = solve_uc(&UcProblem::new(g, 1, exact), &m).unwrap();
    let sys = UcSystem::assemble(&m, 1, None, Exec::default()).unwrap();
    let omega = error_norms(&sys.primal, &sol.u, &exact, RegionSet::OMEGA).unwrap().l2;
    let target = error_norms(&sys.primal, &sol.u, &exact, RegionSet::TARGET).unwrap().l2;
    assert!(omega.is_finite() && target.is_finite());
    assert!(sol.diagnostics.solve_residual < 1e-10);
    let norm_b = error_norms(&sys.primal, &vec![0.0; sys.n_primal()], &exact, RegionSet::TARGET).unwrap().l2;
    assert!(target < norm_b, "{target} vs trivial {norm_b}");
}

#[test]
fn quadratic_interpolant_has_no_residual_stabilization() {
    let g = Geometry::default();
    let m = build_disk_mesh(&g, 8, 2).unwrap();
    let v = FeSpace::new(&m, 2, false).unwrap();
    let mono = HarmonicMonomial::new(2, Part::Re);
    // P2 reproduces quadratics: no Laplacian, no jumps.
    let ui = interpolate_nodal(&v, &|x| mono.eval(x).0);
    let sys = UcSystem::assemble(&m, 2, None, Exec::default()).unwrap();
    let r = sys.stab_parts.residual_part().matvec(&ui).unwrap();
    let norm: f64 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale: f64 = ui.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(norm < 1e-13 * scale * ui.len() as f64, "{norm}");
    assert!(mesh_metrics(&m).h > 0.0);
}

#[test]
fn reports_are_deterministic_across_strategies() {
    let base = StudyConfig {
        levels: vec![1, 2],
        rate_window: (1, 2),
        perturbation: PerturbationSpec::nodal_noise(1e-3, 11),
        ..StudyConfig::default()
    };
    let seq = run_convergence_study(&StudyConfig { exec: Exec::Sequential, ..base.clone() }).unwrap();
    let par = run_convergence_study(&StudyConfig { exec: Exec::Parallel, ..base }).unwrap();
    assert_eq!(report_to_csv(&seq), report_to_csv(&par));
    assert_eq!(report_to_json(&seq), report_to_json(&par));
}
