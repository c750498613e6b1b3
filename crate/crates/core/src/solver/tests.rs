use super::*;
use crate::analysis::{HarmonicMonomial, Part};
use crate::exec::Exec;
use crate::fem::{assemble_load_region, assemble_stiffness, error_norms, interpolate_nodal, FeSpace, FnField, ScalarField};
use crate::mesh::{build_disk_mesh, mesh_metrics, Geometry, Mesh, RegionSet};
use crate::sparse::{dot, norm2};

fn disk(level: usize) -> Mesh {
    build_disk_mesh(&Geometry::default(), 8, level).unwrap()
}

fn mono(n: u32) -> ExactSolution {
    ExactSolution::Monomial(HarmonicMonomial::new(n, Part::Re))
}

/// Dense Gaussian elimination with partial pivoting, independent of the
/// sparse factorization.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

#[test]
fn positivity_identity_holds() {
    for level in 1..=2 {
        let m = disk(level);
        for k in [1, 2] {
            let v = FeSpace::new(&m, k, false).unwrap();
            let v0 = FeSpace::new(&m, k, true).unwrap();
            let dev = verify_positivity(&v, &v0, 100, 3).unwrap();
            assert!(dev <= 1e-12, "level {level} k {k}: {dev}");
        }
    }
}

#[test]
fn positivity_pair_edge_cases() {
    let m = disk(1);
    let sys = UcSystem::assemble(&m, 1, None, Exec::Sequential).unwrap();
    let (u, z) = (vec![0.0; sys.n_primal()], vec![0.0; sys.n_dual()]);
    assert_eq!(sys.positivity_pair(&u, &z), (0.0, 0.0));
    let u: Vec<f64> = (0..sys.n_primal()).map(|i| (i as f64 * 0.37).sin()).collect();
    let z: Vec<f64> = (0..sys.n_dual()).map(|i| (i as f64 * 0.11).cos()).collect();
    let (l1, r1) = sys.positivity_pair(&u, &z);
    let u10: Vec<f64> = u.iter().map(|v| 10.0 * v).collect();
    let z10: Vec<f64> = z.iter().map(|v| 10.0 * v).collect();
    let (l2, r2) = sys.positivity_pair(&u10, &z10);
    assert!((l2 / l1 - 100.0).abs() < 1e-11 && (r2 / r1 - 100.0).abs() < 1e-11);
    assert!(((l1 - r1) / r1).abs() < 1e-12);
}

#[test]
fn space_roles_are_checked() {
    let m = disk(0);
    let v = FeSpace::new(&m, 1, false).unwrap();
    assert!(UcSystem::from_spaces(v.clone(), v.clone(), None).is_err());
    assert!(solve_poisson(&v, &|_| 1.0).is_err());
    assert!(hminus1_residual(&v, &v, &vec![0.0; v.n_dofs()]).is_err());
}

#[test]
fn tikhonov_override_uses_the_larger_scale() {
    let m = disk(2);
    let h = mesh_metrics(&m).h;
    let a = UcSystem::assemble(&m, 1, Some(10.0 * h), Exec::default()).unwrap();
    assert_eq!(a.tikhonov_scale, 10.0 * h);
    let b = UcSystem::assemble(&m, 1, Some(0.1 * h), Exec::default()).unwrap();
    assert_eq!(b.tikhonov_scale, h);
}

/// The discrete solution satisfies, for every primal basis direction,
/// `A_h[(u_I − u_h, −z_h), (v, 0)] − h^{2k}(u_I, v) + (δq + u − u_I, v)_ω
///  = s_residual(u_I, v)`, and `a(u_h − z_h, w) = 0` for dual directions.
#[test]
fn consistency_residual() {
    let g = Geometry::default();
    for k in [1, 2] {
        let m = build_disk_mesh(&g, 8, 2).unwrap();
        let sys = UcSystem::assemble(&m, k, None, Exec::default()).unwrap();
        let exact = mono(3);
        let mut problem = UcProblem::new(g, k, exact);
        problem.perturbation = PerturbationSpec::oscillatory(1e-2, 7.0);
        let sol = sys.solve(&problem).unwrap();
        let delta = make_perturbation(&g, &problem.perturbation, &sys.primal).unwrap();
        let ui = interpolate_nodal(&sys.primal, &|x| exact.value(x));
        let d: Vec<f64> = ui.iter().zip(&sol.u).map(|(a, b)| a - b).collect();

        let s_d = sys.stab.matrix.matvec(&d).unwrap();
        let m_d = sys.mass_omega.matrix.matvec(&d).unwrap();
        let bt_z = sys.coupling.matrix.transpose_matvec(&sol.z).unwrap();
        let tik = sys.stab_parts.mass.matvec(&ui).unwrap();
        let load_u = assemble_load_region(&sys.primal, &|x| exact.value(x), RegionSet::OMEGA).unwrap();
        let m_ui = sys.mass_omega.matrix.matvec(&ui).unwrap();
        let load_dq = delta.load(&sys.primal);
        let w = sys.h.powi(2 * k as i32);
        let lhs: Vec<f64> = (0..ui.len())
            .map(|i| s_d[i] + m_d[i] - bt_z[i] - w * tik[i] + load_dq[i] + (load_u[i] - m_ui[i]))
            .collect();
        let rhs = sys.stab_parts.residual_part().matvec(&ui).unwrap();
        let gap: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        // budget: round-off plus the solver's residual contract
        let x: Vec<f64> = sol.u.iter().chain(&sol.z).copied().collect();
        let contract = sol.diagnostics.solve_residual * (sys.saddle().max_abs() * norm2(&x) + norm2(&load_u));
        let scale = norm2(&load_u) + norm2(&rhs);
        assert!(norm2(&gap) < 1e-11 * scale + 10.0 * contract, "k={k}: {} vs {}", norm2(&gap), contract);

        let dual = sys.coupling.matrix.matvec(&sol.u).unwrap();
        let a0z = sys.a0.matrix.matvec(&sol.z).unwrap();
        let r: Vec<f64> = dual.iter().zip(&a0z).map(|(a, b)| a - b).collect();
        assert!(norm2(&r) < 1e-10 * (norm2(&dual) + 1e-300));
    }
}

#[test]
fn solution_matches_dense_oracle() {
    let g = Geometry::default();
    let m = build_disk_mesh(&g, 8, 1).unwrap();
    let sys = UcSystem::assemble(&m, 1, None, Exec::Sequential).unwrap();
    let problem = UcProblem::new(g, 1, mono(3));
    let sol = sys.solve(&problem).unwrap();
    let load = sys.data_load(&mono(3), &DataPerturbation::zero());
    let mut rhs = load.clone();
    rhs.resize(sys.n_primal() + sys.n_dual(), 0.0);
    let x = dense_solve(sys.saddle().to_dense(), rhs);
    let sparse: Vec<f64> = sol.u.iter().chain(&sol.z).copied().collect();
    let diff: Vec<f64> = x.iter().zip(&sparse).map(|(a, b)| a - b).collect();
    assert!(norm2(&diff) < 1e-10 * norm2(&x));
    assert!(sol.diagnostics.solve_residual < 1e-12);
}

#[test]
fn solutions_are_linear_in_the_data() {
    let g = Geometry::default();
    let m = build_disk_mesh(&g, 8, 2).unwrap();
    let mut p = UcProblem::new(g, 1, ExactSolution::Zero);
    p.perturbation = PerturbationSpec::oscillatory(1e-3, 10.0);
    let a = solve_uc(&p, &m).unwrap();
    p.perturbation.epsilon = 2e-3;
    let b = solve_uc(&p, &m).unwrap();
    for (x, y) in a.u.iter().zip(&b.u) {
        assert!((2.0 * x - y).abs() <= 1e-12 * norm2(&b.u));
    }
    assert!((b.diagnostics.perturbation_norm / 2e-3 - 1.0).abs() < 1e-10);

    // unperturbed data gives the same field whichever way it is switched off
    let mut q = UcProblem::new(g, 1, mono(3));
    let c = solve_uc(&q, &m).unwrap();
    q.perturbation = PerturbationSpec::oscillatory(0.0, 10.0);
    assert_eq!(c.u, solve_uc(&q, &m).unwrap().u);
}

#[test]
fn sequential_and_parallel_solves_agree() {
    let g = Geometry::default();
    let m = build_disk_mesh(&g, 8, 2).unwrap();
    let mut p = UcProblem::new(g, 2, mono(3));
    p.exec = Exec::Sequential;
    let a = solve_uc(&p, &m).unwrap();
    p.exec = Exec::Parallel;
    let b = solve_uc(&p, &m).unwrap();
    assert_eq!(a.u, b.u);
    assert_eq!(a.z, b.z);
}

#[test]
fn affine_data_error_decreases() {
    let g = Geometry::default();
    let exact = mono(2);
    let errs: Vec<f64> = (1..=4)
        .map(|level| {
            let m = build_disk_mesh(&g, 8, level).unwrap();
            let sys = UcSystem::assemble(&m, 1, None, Exec::default()).unwrap();
            let sol = sys.solve(&UcProblem::new(g, 1, exact)).unwrap();
            error_norms(&sys.primal, &sol.u, &exact, RegionSet::TARGET).unwrap().l2
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn data_fit_and_a_priori_bound() {
    let g = Geometry::default();
    let exact = mono(3);
    let u_norm = exact.sobolev_norm(0, 1.0);
    for level in 1..=3 {
        let m = build_disk_mesh(&g, 8, level).unwrap();
        let sys = UcSystem::assemble(&m, 1, None, Exec::default()).unwrap();
        let sol = sys.solve(&UcProblem::new(g, 1, exact)).unwrap();
        let uh = crate::fem::fe_norms(&sys.primal, &sol.u, RegionSet::ALL).unwrap().l2;
        assert!(uh <= 2.0 * u_norm, "level {level}: {uh} vs {u_norm}");
        // |||(u_I − u_h, z_h)||| controls the data misfit of the interpolant
        let ui = interpolate_nodal(&sys.primal, &|x| exact.value(x));
        let d: Vec<f64> = ui.iter().zip(&sol.u).map(|(a, b)| a - b).collect();
        let parts = sys.triple_norm_parts(&d, &sol.z);
        assert!(parts.data.sqrt() <= parts.total());
    }
}

#[test]
fn poisson_zero_load_is_zero() {
    let m = disk(2);
    let v0 = FeSpace::new(&m, 1, true).unwrap();
    assert!(solve_poisson(&v0, &|_| 0.0).unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn poisson_bubble_converges() {
    let exact = FnField(|x: [f64; 2]| 1.0 - x[0] * x[0] - x[1] * x[1], |x: [f64; 2]| [-2.0 * x[0], -2.0 * x[1]]);
    let pts: Vec<(f64, f64)> = (1..=4)
        .map(|level| {
            let m = disk(level);
            let v0 = FeSpace::new(&m, 1, true).unwrap();
            let u = solve_poisson(&v0, &|_| 4.0).unwrap();
            (mesh_metrics(&m).h, error_norms(&v0, &u, &exact, RegionSet::ALL).unwrap().h1_semi)
        })
        .collect();
    let rate = crate::analysis::fit_rate(&pts[1..]).unwrap().slope;
    assert!((rate - 1.0).abs() < 0.15, "{rate}");
}

#[test]
fn hminus1_of_affine_vanishes() {
    let m = disk(2);
    for k in [1, 2] {
        let v = FeSpace::new(&m, k, false).unwrap();
        let v0 = FeSpace::new(&m, k, true).unwrap();
        let u = interpolate_nodal(&v, &|x| 0.3 - x[0] + 2.0 * x[1]);
        assert!(hminus1_residual(&v0, &v, &u).unwrap() < 1e-10);
    }
}

#[test]
fn hminus1_matches_poisson_oracle() {
    // |x|² lies in P2, so a(u_I, w) = (−4, w) and φ = −u_P with −Δu_P = 4
    let m = disk(2);
    let v = FeSpace::new(&m, 2, false).unwrap();
    let v0 = FeSpace::new(&m, 2, true).unwrap();
    let u = interpolate_nodal(&v, &|x| x[0] * x[0] + x[1] * x[1]);
    let r = hminus1_residual(&v0, &v, &u).unwrap();
    let up = solve_poisson(&v0, &|_| 4.0).unwrap();
    let a0 = assemble_stiffness(&v0, &v0).unwrap();
    let oracle = a0.matrix.bilinear(&up, &up).unwrap().sqrt();
    assert!((r - oracle).abs() < 1e-8 * oracle, "{r} vs {oracle}");
}

#[test]
fn hminus1_matches_dense_oracle_for_p1() {
    let m = disk(1);
    let v = FeSpace::new(&m, 1, false).unwrap();
    let v0 = FeSpace::new(&m, 1, true).unwrap();
    let u = interpolate_nodal(&v, &|x| x[0] * x[0] + x[1] * x[1]);
    let a0 = assemble_stiffness(&v0, &v0).unwrap().matrix;
    let b = assemble_stiffness(&v0, &v).unwrap().matrix;
    let r = b.matvec(&u).unwrap();
    let phi = dense_solve(a0.to_dense(), r.clone());
    let oracle = dot(&phi, &r).sqrt();
    let got = hminus1_residual(&v0, &v, &u).unwrap();
    assert!((got - oracle).abs() < 1e-10 * oracle);
}
