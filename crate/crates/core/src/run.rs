//! Config-driven runs and their CSV / manifest outputs.

use crate::bath::{min_sonic_bound, UnitSystem};
use crate::config::{BcConfig, Protocol, RunConfig};
use crate::error::Result;
use crate::fidelity::{self, TransportResult};
use crate::kernels::GridSpec;
use crate::model::Model;
use crate::quadrature::PANEL_ORDER;
use crate::solvers::{SolveReport, Trajectory};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct CellOutcome {
    pub t_f: f64,
    pub result: TransportResult,
    pub survival_const: f64,
    pub survival_cdf: f64,
    pub adiabatic: bool,
    pub speed_ok: bool,
    pub report: SolveReport,
}

/// One protocol run at a given t_f.
pub fn run_cell(model: &Model, cfg: &RunConfig, t_f: f64) -> Result<CellOutcome> {
    let grid = GridSpec::new(t_f, cfg.grid.n_t)?;
    let s = &cfg.solver;
    let (traj, report) = match (cfg.protocol, cfg.bc) {
        (Protocol::ConstantSpeed, bc) => {
            let v_bar = match bc {
                BcConfig::Velocity { .. } => bc.velocity().unwrap().vf,
                BcConfig::Position { xf } => xf / t_f,
            };
            let rep = SolveReport { method: "constant_speed".into(), ..Default::default() };
            (fidelity::constant_speed(v_bar, &grid), rep)
        }
        (Protocol::AcquditLinear, BcConfig::Position { xf }) => {
            let sol = model.solve_position_bc(grid, s, xf)?;
            (sol.trajectory, sol.report)
        }
        (p, bc) => {
            let vbc = bc.velocity().expect("validated: velocity boundary values");
            let sol = match p {
                Protocol::AcquditPicard => model.solve_picard(grid, s, vbc)?,
                Protocol::Dissipationless => model.solve_dissipationless(grid, s, vbc)?,
                _ => model.solve_linear(grid, s, vbc)?,
            };
            (sol.trajectory, sol.report)
        }
    };
    let plain = model.survival(&traj)?;
    let cdf = model.survival_cdf(&traj)?;
    let v_end = *traj.v.last().unwrap();
    let constant = model.survival(&fidelity::constant_speed(v_end, &grid))?;
    let (_, _, adiabatic) = fidelity::adiabaticity_check(&traj, &model.tables, 3.0);
    let (_, _, speed_ok) = fidelity::speed_condition_check(&traj, &model.tables);
    let result = if cfg.protocol == Protocol::CdfOnOptimal { cdf.clone() } else { plain };
    Ok(CellOutcome {
        t_f,
        survival_const: constant.survival,
        survival_cdf: cdf.survival,
        adiabatic,
        speed_ok,
        result,
        report,
    })
}

/// All t_f cells of the config, in order; parallel over cells.
pub fn run_cells(model: &Model, cfg: &RunConfig) -> Result<Vec<CellOutcome>> {
    cfg.t_f_values()
        .par_iter()
        .map(|&t_f| run_cell(model, cfg, t_f))
        .collect()
}

fn e(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::from("t,x,v,a\n");
    for i in 0..traj.n_t() {
        writeln!(s, "{},{},{},{}", e(traj.times[i]), e(traj.x[i]), e(traj.v[i]), e(traj.a[i])).unwrap();
    }
    s
}

pub fn comparison_csv(cells: &[CellOutcome]) -> String {
    let mut s = String::from("t_f,survival_opt,survival_const,survival_cdf,J_na,J_bath,adiabatic_flag,speed_ok\n");
    for c in cells {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            e(c.t_f),
            e(c.result.survival),
            e(c.survival_const),
            e(c.survival_cdf),
            e(c.result.j_nonadiabatic),
            e(c.result.j_bath),
            c.adiabatic as u8,
            c.speed_ok as u8
        )
        .unwrap();
    }
    s
}

pub fn kernels_csv(model: &Model, grid: GridSpec) -> Result<String> {
    let k = model.kernels(grid)?;
    let t = grid.times();
    let mut s = String::from("t,eta,zeta,phi,phi1\n");
    for i in 0..grid.n_t {
        writeln!(s, "{},{},{},{},{}", e(t[i]), e(k.eta[i]), e(k.zeta[i]), e(k.phi[i]), e(k.phi1[i])).unwrap();
    }
    Ok(s)
}

pub fn tables_csv(model: &Model) -> String {
    let tb = &model.tables;
    let mut s = String::from("eps,k,mu,d_abs_sq,dipole\n");
    for ie in 0..tb.n_eps() {
        for ik in 0..tb.n_k() {
            writeln!(
                s,
                "{},{},{},{},{}",
                e(tb.eps.nodes[ie]),
                e(tb.k.nodes[ik]),
                e(tb.mu[ie]),
                e(tb.d_abs_sq_at(ie, ik)),
                e(tb.dipole[ie])
            )
            .unwrap();
        }
    }
    s
}

#[derive(Serialize)]
struct CellManifest<'a> {
    t_f: f64,
    method: &'a str,
    terms_used: usize,
    last_update: f64,
    fredholm_residual: f64,
    survival: f64,
    x_final: f64,
    kinetic_integral: f64,
    speed_margin: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config: &'a RunConfig,
    content_hash: String,
    units: UnitSystem,
    unit_note: &'static str,
    quadrature: serde_json::Value,
    min_sonic_bound: f64,
    cells: Vec<CellManifest<'a>>,
}

pub fn manifest_json(command: &str, model: &Model, cfg: &RunConfig, cells: &[CellOutcome]) -> String {
    let m = Manifest {
        command,
        config: cfg,
        content_hash: cfg.content_hash(),
        units: UnitSystem::default(),
        unit_note: "hbar = m_B = xi = 1, c = 1/sqrt(2), t_B = 1; bc speeds in multiples of c",
        quadrature: serde_json::json!({
            "time": {"rule": "composite trapezoid", "n_t": cfg.grid.n_t},
            "eps": {"rule": "composite Gauss-Legendre", "panel_order": PANEL_ORDER,
                    "n_eps": cfg.bath.n_eps, "eps_max": cfg.bath.eps_max},
            "k": {"rule": "symmetric composite Gauss-Legendre, k = 0 excluded", "panel_order": PANEL_ORDER,
                  "n_k": cfg.bath.n_k, "k_max": cfg.bath.k_max},
            "eta1_zeta1_s_integral": "piecewise-linear phase, exact per cell",
        }),
        min_sonic_bound: min_sonic_bound(&model.tables),
        cells: cells
            .iter()
            .map(|c| CellManifest {
                t_f: c.t_f,
                method: &c.report.method,
                terms_used: c.report.terms_used,
                last_update: c.report.last_update,
                fredholm_residual: c.report.fredholm_residual,
                survival: c.result.survival,
                x_final: c.result.trajectory.x_final(),
                kinetic_integral: c.result.kinetic_integral,
                speed_margin: c.result.speed_margin,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&m).expect("manifest serializes")
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), body)?;
    Ok(())
}

/// `solve` and `sweep`: per-cell trajectories, comparison table, manifest.
pub fn run_to_dir(command: &str, cfg: &RunConfig, out: &Path) -> Result<Vec<CellOutcome>> {
    let model = Model::new(cfg.trap, cfg.bath)?;
    let cells = run_cells(&model, cfg)?;
    if cells.len() == 1 {
        write(out, "trajectory.csv", &trajectory_csv(&cells[0].result.trajectory))?;
    } else {
        for (i, c) in cells.iter().enumerate() {
            write(out, &format!("trajectory_{i:03}.csv"), &trajectory_csv(&c.result.trajectory))?;
        }
    }
    write(out, "comparison.csv", &comparison_csv(&cells))?;
    write(out, "manifest.json", &manifest_json(command, &model, cfg, &cells))?;
    Ok(cells)
}

pub fn kernels_to_dir(cfg: &RunConfig, out: &Path) -> Result<()> {
    let model = Model::new(cfg.trap, cfg.bath)?;
    write(out, "kernels.csv", &kernels_csv(&model, cfg.grid)?)?;
    write(out, "tables.csv", &tables_csv(&model))?;
    Ok(())
}
