//! Quick invariant suite behind the `validate` subcommand.

use crate::bath::{BathSpec, C_SOUND};
use crate::error::Result;
use crate::fidelity::{self, max_abs};
use crate::kernels::{eval_eta1_zeta1_all, GridSpec};
use crate::model::Model;
use crate::morse::{build_structure, TrapSpec};
use crate::solvers::{linear_system, SolverSettings, Trajectory, VelocityBc};
use crate::specfun::{abs_gamma_sq, complex_gamma};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.into(), passed, detail }
}

/// Runs on a coarse grid; `tol` is the Neumann tolerance.
pub fn run_suite(tol: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let worst = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|&y| {
            let exact = PI * y / (PI * y).sinh();
            (abs_gamma_sq(Complex64::new(1.0, y)).unwrap() - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    out.push(check("gamma modulus identity", worst < 1e-10, format!("max rel err {worst:.2e}")));

    let mut rec = 0.0f64;
    for i in 0..50 {
        let z = Complex64::new(-19.3 + 0.77 * i as f64, -18.0 + 0.71 * i as f64);
        let g1 = complex_gamma(z + 1.0)?;
        rec = rec.max((g1 - z * complex_gamma(z)?).norm() / g1.norm());
    }
    out.push(check("gamma recurrence", rec < 1e-10, format!("max rel err {rec:.2e}")));

    let gate = build_structure(TrapSpec::new(2.0, 1.0, 0.5)).is_ok()
        && build_structure(TrapSpec::new(2.0, 2.0, 2.0)).is_ok()
        && build_structure(TrapSpec::new(2.0, 1.0, 2.0)).is_err();
    out.push(check("single bound-state gate", gate, String::new()));

    let model = Model::new(TrapSpec::new(2.0, 1.0, 0.5), BathSpec::new(1.0).with_nodes(40, 40))?;
    let grid = GridSpec::new(1.0, 64)?;
    let k = model.kernels(grid)?;
    let eta_max = max_abs(&k.eta);
    let zeta_max = max_abs(&k.zeta);
    out.push(check(
        "eta vanishes on symmetric k grid",
        eta_max < 1e-10 * zeta_max.max(1.0),
        format!("max|eta| {eta_max:.2e}, max|zeta| {zeta_max:.2e}"),
    ));
    let bounded = k.phi.iter().all(|p| p.abs() <= k.phi[0] * (1.0 + 1e-12));
    out.push(check("phi bounded by phi(0)", bounded, format!("phi(0) {:.6}", k.phi[0])));

    let (e1, z1) = eval_eta1_zeta1_all(&grid, &model.channels, &vec![0.0; grid.n_t])?;
    let d = max_abs(&e1.iter().zip(&k.eta).map(|(a, b)| a - b).collect::<Vec<_>>())
        .max(max_abs(&z1.iter().zip(&k.zeta).map(|(a, b)| a - b).collect::<Vec<_>>()));
    out.push(check("eta1/zeta1 reduce to eta/zeta at x = 0", d < 1e-8, format!("max diff {d:.2e}")));

    let settings = SolverSettings { tol, ..Default::default() };
    let (sys, _) = linear_system(&k, &settings, VelocityBc::new(0.0, 1.5 * C_SOUND))?;
    let (q, report) = sys.neumann(settings.series_terms, tol)?;
    let direct = sys.direct_solve().expect("I - K invertible");
    let gap = (&q - &direct).amax();
    out.push(check(
        "Neumann sum matches direct solve",
        gap < 10.0 * tol && report.fredholm_residual < 10.0 * tol,
        format!("diff {gap:.2e}, residual {:.2e}, terms {}", report.fredholm_residual, report.terms_used),
    ));

    let small = Model::new(TrapSpec::new(2.0, 1.0, 0.5), BathSpec::new(1.0).with_nodes(24, 24))?;
    let g64 = GridSpec::new(1.0, 64)?;
    let t = g64.times();
    let traj = Trajectory::from_velocity(&g64, t.iter().map(|&x| 0.8 * x + 0.3 * (5.0 * x).sin()).collect())?;
    let fast = fidelity::j_bath(&traj, &small.channels)? ;
    let slow = fidelity::j_bath_bruteforce(&traj, &small.channels);
    let na = fidelity::j_nonadiabatic(&traj, &small.tables)?;
    let na_slow = fidelity::j_nonadiabatic_bruteforce(&traj, &small.tables);
    let rel = ((fast - slow) / slow).abs().max(((na - na_slow) / na_slow).abs());
    out.push(check("fidelity double-integral oracle", rel < 1e-8, format!("max rel diff {rel:.2e}")));

    Ok(out)
}
