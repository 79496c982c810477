use acqudit_core::solvers::{
    dissipationless_system, linear_system, position_system, solve_dissipationless, solve_linear,
    solve_linear_position_bc, solve_nonlinear_picard, SolverSettings, VelocityBc,
};
use acqudit_core::{BathSpec, Error, GridSpec, Model, TrapSpec, C_SOUND};
use proptest::prelude::*;

fn model(g: f64) -> Model {
    Model::new(TrapSpec::new(2.0, 1.0, 0.5), BathSpec::new(g).with_nodes(40, 40)).unwrap()
}

fn grid(tf: f64) -> GridSpec {
    GridSpec::new(tf, 64).unwrap()
}

#[test]
fn vacuum_at_rest_stays_at_rest() {
    let m = model(0.0);
    let s = SolverSettings::default();
    let sol = m.solve_linear(grid(1.0), &s, VelocityBc::new(0.0, 0.0)).unwrap();
    assert!(sol.trajectory.v.iter().all(|&v| v == 0.0));
    assert!(sol.trajectory.x.iter().all(|&x| x == 0.0));
    assert_eq!(m.survival(&sol.trajectory).unwrap().survival, 1.0);
    let pos = m.solve_position_bc(grid(1.0), &s, 0.0).unwrap();
    assert!(pos.trajectory.v.iter().all(|&v| v == 0.0));
    let dl = m
        .solve_dissipationless(grid(1.0), &SolverSettings { lambda1: 0.0, ..s }, VelocityBc::new(0.0, 0.0))
        .unwrap();
    assert!(dl.trajectory.v.iter().all(|&v| v == 0.0));
}

#[test]
fn boundary_values_exact_and_residual_small() {
    let m = model(1.0);
    let s = SolverSettings::default();
    let k = m.kernels(grid(1.5)).unwrap();
    for vf_c in [0.5, 1.5] {
        let bc = VelocityBc::new(0.0, vf_c * C_SOUND);
        let sol = solve_linear(&k, &s, bc).unwrap();
        assert_eq!(sol.trajectory.v[0], 0.0);
        assert!((sol.trajectory.v[63] - bc.vf).abs() < 1e-15);
        assert!(sol.report.fredholm_residual < 10.0 * s.tol);
        let (sys, _) = linear_system(&k, &s, bc).unwrap();
        let direct = sys.direct_solve().unwrap();
        let series = sys.neumann(50, 1e-14).unwrap().0;
        assert!((direct - series).amax() < 1e-12);
    }
    let (sys, _) = dissipationless_system(&k, &s, VelocityBc::new(0.0, 1.0)).unwrap();
    let (u, _) = sys.neumann(50, s.tol).unwrap();
    assert!(sys.residual(&u) < 10.0 * s.tol);
    let (sys, _) = position_system(&k, &s, 0.3).unwrap();
    let (u, _) = sys.neumann(50, s.tol).unwrap();
    assert!(sys.residual(&u) < 10.0 * s.tol);
}

#[test]
fn picard_equals_linear_without_bath() {
    let m = model(0.0);
    let s = SolverSettings::default();
    let k = m.kernels(grid(1.0)).unwrap();
    let bc = VelocityBc::new(0.0, 1.5 * C_SOUND);
    let lin = solve_linear(&k, &s, bc).unwrap();
    let pic = solve_nonlinear_picard(&k, &m.channels, &s, bc).unwrap();
    for (a, b) in lin.trajectory.v.iter().zip(&pic.trajectory.v) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn picard_reports_non_convergence() {
    let m = model(1.0);
    let k = m.kernels(grid(1.0)).unwrap();
    let s = SolverSettings { picard_iters: 2, ..Default::default() };
    match solve_nonlinear_picard(&k, &m.channels, &s, VelocityBc::new(0.0, 1.0)) {
        Err(Error::NonConvergence { history, .. }) => assert_eq!(history.len(), 2),
        other => panic!("expected NonConvergence, got {other:?}"),
    }
}

#[test]
fn neumann_reports_non_convergence() {
    let m = model(1.0);
    let k = m.kernels(grid(1.0)).unwrap();
    let s = SolverSettings { series_terms: 3, tol: 1e-15, ..Default::default() };
    assert!(matches!(
        solve_linear(&k, &s, VelocityBc::new(0.0, 1.0)),
        Err(Error::NonConvergence { .. })
    ));
}

#[test]
fn position_bc_hits_target_and_matches_velocity_bc() {
    let m = model(1.0);
    let s = SolverSettings { tol: 1e-13, series_terms: 200, ..Default::default() };
    let k = m.kernels(grid(1.0)).unwrap();
    let v_bc = solve_linear(&k, &s, VelocityBc::new(0.0, 1.5 * C_SOUND)).unwrap();
    let xf = v_bc.trajectory.x_final();
    let p = solve_linear_position_bc(&k, &s, xf).unwrap();
    assert!((p.trajectory.x_final() - xf).abs() < 1e-10);
    for (a, b) in p.trajectory.v.iter().zip(&v_bc.trajectory.v) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn dissipationless_endpoint_and_lambda1_sign() {
    let m = model(0.0);
    let k = m.kernels(grid(0.5)).unwrap();
    let s = SolverSettings::default();
    let sol = solve_dissipationless(&k, &s, VelocityBc::new(0.0, 1.5 * C_SOUND)).unwrap();
    assert!((sol.trajectory.v[63] - 1.5 * C_SOUND).abs() < 1e-15);
    let up = solve_dissipationless(&k, &s, VelocityBc::new(0.0, 0.0)).unwrap();
    let down = solve_dissipationless(&k, &SolverSettings { lambda1: -1.0, ..s }, VelocityBc::new(0.0, 0.0)).unwrap();
    for (a, b) in up.trajectory.v.iter().zip(&down.trajectory.v) {
        assert!((a + b).abs() < 1e-12);
    }
    assert!(up.trajectory.v[32].abs() > 1e-3);
}

#[test]
fn grid_mismatch_detected() {
    let m = model(1.0);
    let mut k = m.kernels(grid(1.0)).unwrap();
    k.eta.pop();
    assert!(matches!(
        solve_linear(&k, &SolverSettings::default(), VelocityBc::new(0.0, 1.0)),
        Err(Error::GridMismatch(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn linear_in_boundary_speed(vf in -1.5f64..1.5, tf in 0.2f64..2.5) {
        // η ≡ 0, so v scales with vf
        let m = model(1.0);
        let k = m.kernels(grid(tf)).unwrap();
        let s = SolverSettings { tol: 1e-13, ..Default::default() };
        let unit = solve_linear(&k, &s, VelocityBc::new(0.0, 1.0)).unwrap();
        let got = solve_linear(&k, &s, VelocityBc::new(0.0, vf)).unwrap();
        for (a, b) in got.trajectory.v.iter().zip(&unit.trajectory.v) {
            prop_assert!((a - vf * b).abs() < 1e-10);
        }
    }
}
