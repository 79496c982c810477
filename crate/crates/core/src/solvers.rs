//! Boundary-value solvers for the optimal trap velocity.
//!
//! Every time integral is a composite trapezoid sum on the uniform grid, so
//! the discrete Green's-function operators invert the 3-point second
//! difference exactly.

use crate::bath::BathChannels;
use crate::error::{Error, Result};
use crate::kernels::{eval_eta1_zeta1_all, GridSpec, KernelSet};
use crate::quadrature::cumulative_trapezoid;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
}

impl Trajectory {
    /// Integrates v (trapezoid, x(0) = 0) and differentiates it.
    pub fn from_velocity(grid: &GridSpec, v: Vec<f64>) -> Result<Self> {
        if v.len() != grid.n_t {
            return Err(Error::GridMismatch(format!("v has {} nodes, grid has {}", v.len(), grid.n_t)));
        }
        let h = grid.h();
        let x = cumulative_trapezoid(&v, h);
        let a = finite_difference(&v, h);
        Ok(Trajectory { times: grid.times(), x, v, a })
    }

    pub fn t_f(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn n_t(&self) -> usize {
        self.times.len()
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec { t_f: self.t_f(), n_t: self.n_t() }
    }

    pub fn x_final(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn max_speed(&self) -> f64 {
        self.v.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// ∫v² dt (trapezoid).
    pub fn kinetic_integral(&self) -> f64 {
        let w = self.grid().weights();
        self.v.iter().zip(&w).map(|(v, w)| w * v * v).sum()
    }

    /// Linear interpolation of x at an arbitrary time in [0, t_f].
    pub fn x_at(&self, t: f64) -> f64 {
        let n = self.n_t();
        let h = self.t_f() / (n - 1) as f64;
        let u = (t / h).clamp(0.0, (n - 1) as f64);
        let j = (u.floor() as usize).min(n - 2);
        let f = u - j as f64;
        self.x[j] * (1.0 - f) + self.x[j + 1] * f
    }
}

/// Centered differences inside, second-order one-sided at the ends.
fn finite_difference(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut a = vec![0.0; n];
    for i in 1..n - 1 {
        a[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    a[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    a[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "one")]
    pub lambda1: f64,
    #[serde(default = "default_terms")]
    pub series_terms: usize,
    #[serde(default = "default_picard")]
    pub picard_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Initial Picard relaxation factor ω ∈ (0, 1].
    #[serde(default = "one")]
    pub relaxation: f64,
}

fn one() -> f64 {
    1.0
}
fn default_terms() -> usize {
    50
}
fn default_picard() -> usize {
    20
}
fn default_tol() -> f64 {
    1e-8
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            lambda: 1.0,
            lambda1: 1.0,
            series_terms: 50,
            picard_iters: 20,
            tol: 1e-8,
            relaxation: 1.0,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0.0 || !self.lambda.is_finite() {
            return Err(Error::config("solver.lambda", "must be finite and nonzero"));
        }
        if !self.lambda1.is_finite() {
            return Err(Error::config("solver.lambda1", "must be finite"));
        }
        if self.series_terms < 3 {
            return Err(Error::config("solver.series_terms", "need at least 3 terms"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::config("solver.tol", "must be > 0"));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::config("solver.relaxation", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Velocity boundary values v(0) = v0, v(t_f) = vf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityBc {
    #[serde(default)]
    pub v0: f64,
    pub vf: f64,
}

impl VelocityBc {
    pub fn new(v0: f64, vf: f64) -> Self {
        VelocityBc { v0, vf }
    }

    fn ramp(&self, grid: &GridSpec) -> DVector<f64> {
        let t = grid.times();
        DVector::from_iterator(grid.n_t, t.iter().map(|&ti| self.v0 + (self.vf - self.v0) * ti / grid.t_f))
    }
}

/// Two-point Green's function for λ∂²_t with zero end values.
pub fn greens2(t: f64, s: f64, t_f: f64, lambda: f64) -> f64 {
    if t < s {
        -t * (t_f - s) / (lambda * t_f)
    } else {
        -s * (t_f - t) / (lambda * t_f)
    }
}

/// Green's function of the third-order problem with x(0) = v(0) = 0, x(t_f) = 0.
pub fn greens3(t: f64, s: f64, t_f: f64) -> f64 {
    let tail = t / (t_f * t_f) * (t_f - s) * (t_f - s);
    if s <= t {
        (t - s) - tail
    } else {
        -tail
    }
}

/// u = f + K u, discretized with kernel weights already folded into K.
#[derive(Debug, Clone)]
pub struct FredholmSystem {
    pub kernel: DMatrix<f64>,
    pub source: DVector<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: String,
    pub terms_used: usize,
    pub last_update: f64,
    pub fredholm_residual: f64,
    pub iteration_history: Vec<f64>,
}

impl FredholmSystem {
    pub fn n(&self) -> usize {
        self.source.len()
    }

    /// Liouville-Neumann sum, stopping once a term drops below `tol`.
    pub fn neumann(&self, max_terms: usize, tol: f64) -> Result<(DVector<f64>, SolveReport)> {
        let mut sum = self.source.clone();
        let mut term = self.source.clone();
        let mut history = Vec::new();
        let mut last = term.amax();
        let mut used = 0;
        while last >= tol && used < max_terms {
            term = &self.kernel * &term;
            sum += &term;
            used += 1;
            last = term.amax();
            history.push(last);
        }
        if last >= tol {
            return Err(Error::NonConvergence {
                method: "neumann",
                iterations: used,
                last_update: last,
                history,
            });
        }
        let report = SolveReport {
            method: "neumann".into(),
            terms_used: used,
            last_update: last,
            fredholm_residual: self.residual(&sum),
            iteration_history: history,
        };
        Ok((sum, report))
    }

    /// Partial sums S_0 ..= S_terms of the Neumann series.
    pub fn partial_sums(&self, terms: usize) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(terms + 1);
        let mut sum = self.source.clone();
        let mut term = self.source.clone();
        out.push(sum.clone());
        for _ in 0..terms {
            term = &self.kernel * &term;
            sum += &term;
            out.push(sum.clone());
        }
        out
    }

    /// sup|f + K u - u|.
    pub fn residual(&self, u: &DVector<f64>) -> f64 {
        (&self.source + &self.kernel * u - u).amax()
    }

    /// Dense LU solve of (I - K) u = f; used only as a cross-check.
    pub fn direct_solve(&self) -> Option<DVector<f64>> {
        let n = self.n();
        (DMatrix::<f64>::identity(n, n) - &self.kernel).lu().solve(&self.source)
    }
}

fn green_matrix(grid: &GridSpec, lambda: f64) -> DMatrix<f64> {
    let t = grid.times();
    DMatrix::from_fn(grid.n_t, grid.n_t, |i, j| greens2(t[i], t[j], grid.t_f, lambda))
}

fn green3_matrix(grid: &GridSpec) -> DMatrix<f64> {
    let t = grid.times();
    DMatrix::from_fn(grid.n_t, grid.n_t, |i, j| greens3(t[i], t[j], grid.t_f))
}

fn lag_matrix(lagged: &[f64]) -> DMatrix<f64> {
    let n = lagged.len();
    DMatrix::from_fn(n, n, |i, j| lagged[i.abs_diff(j)])
}

/// Right-multiplies by diag(w).
fn scale_columns(mut m: DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    for (j, &wj) in w.iter().enumerate() {
        m.column_mut(j).scale_mut(wj);
    }
    m
}

/// Operator v ↦ ∫φ(t-s)v(s)ds - ζ(t)v(t) on the grid (trapezoid).
fn memory_operator(kernels: &KernelSet) -> DMatrix<f64> {
    let w = kernels.grid.weights();
    let mut m = scale_columns(lag_matrix(&kernels.phi), &w);
    for i in 0..kernels.grid.n_t {
        m[(i, i)] -= kernels.zeta[i];
    }
    m
}

fn check_kernels(kernels: &KernelSet) -> Result<()> {
    let n = kernels.grid.n_t;
    if kernels.eta.len() != n || kernels.zeta.len() != n || kernels.phi.len() != n || kernels.phi1.len() != n {
        return Err(Error::GridMismatch("kernel samples do not match the time grid".into()));
    }
    Ok(())
}

/// Fredholm system for Q = v - ramp under velocity boundary values.
pub fn linear_system(kernels: &KernelSet, settings: &SolverSettings, bc: VelocityBc) -> Result<(FredholmSystem, DVector<f64>)> {
    settings.validate()?;
    check_kernels(kernels)?;
    let grid = kernels.grid;
    let w = grid.weights();
    let gw = scale_columns(green_matrix(&grid, settings.lambda), &w);
    let memory = memory_operator(kernels);
    let ramp = bc.ramp(&grid);
    let eta = DVector::from_column_slice(&kernels.eta);
    let kernel = &gw * &memory;
    let source = &gw * (&memory * &ramp - eta);
    Ok((FredholmSystem { kernel, source }, ramp))
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub report: SolveReport,
}

/// Linearized dissipative Euler-Lagrange equation
/// λ v̈ = -η - ζ v + ∫φ(t-s) v(s) ds with velocity boundary values.
pub fn solve_linear(kernels: &KernelSet, settings: &SolverSettings, bc: VelocityBc) -> Result<Solution> {
    let (sys, ramp) = linear_system(kernels, settings, bc)?;
    let (q, mut report) = sys.neumann(settings.series_terms, settings.tol)?;
    report.method = "green_neumann".into();
    let v = (q + ramp).as_slice().to_vec();
    Ok(Solution { trajectory: Trajectory::from_velocity(&kernels.grid, v)?, report })
}

/// Fredholm system for u = v - 2 x_f t/t_f² using the third-order Green's function.
pub fn position_system(kernels: &KernelSet, settings: &SolverSettings, x_f: f64) -> Result<(FredholmSystem, DVector<f64>)> {
    settings.validate()?;
    check_kernels(kernels)?;
    let grid = kernels.grid;
    let w = grid.weights();
    let mut g3w = scale_columns(green3_matrix(&grid), &w);
    g3w.scale_mut(1.0 / settings.lambda);
    let memory = memory_operator(kernels);
    let t = grid.times();
    let base = DVector::from_iterator(grid.n_t, t.iter().map(|&ti| 2.0 * x_f * ti / (grid.t_f * grid.t_f)));
    let eta = DVector::from_column_slice(&kernels.eta);
    let kernel = &g3w * &memory;
    let source = &g3w * (&memory * &base - eta);
    Ok((FredholmSystem { kernel, source }, base))
}

/// Same equation with x(0) = 0, v(0) = 0, x(t_f) = x_f prescribed.
pub fn solve_linear_position_bc(kernels: &KernelSet, settings: &SolverSettings, x_f: f64) -> Result<Solution> {
    let (sys, base) = position_system(kernels, settings, x_f)?;
    let (u, mut report) = sys.neumann(settings.series_terms, settings.tol)?;
    report.method = "green3_neumann".into();
    let traj = Trajectory::from_velocity(&kernels.grid, (u + base).as_slice().to_vec())?;
    let achieved = traj.x_final();
    if (achieved - x_f).abs() > 1e-6 * x_f.abs().max(1.0) {
        return Err(Error::BoundaryMiss { achieved, target: x_f });
    }
    Ok(Solution { trajectory: traj, report })
}

/// Fredholm system of the bath-free equation λ v̈ = λ₁/2 + ∫φ₁(t-s) v(s) ds.
pub fn dissipationless_system(kernels: &KernelSet, settings: &SolverSettings, bc: VelocityBc) -> Result<(FredholmSystem, DVector<f64>)> {
    settings.validate()?;
    check_kernels(kernels)?;
    let grid = kernels.grid;
    let w = grid.weights();
    let gw = scale_columns(green_matrix(&grid, settings.lambda), &w);
    let phi1w = scale_columns(lag_matrix(&kernels.phi1), &w);
    let ramp = bc.ramp(&grid);
    let drive = DVector::from_element(grid.n_t, 0.5 * settings.lambda1);
    let kernel = &gw * &phi1w;
    let source = &gw * (drive + &phi1w * &ramp);
    Ok((FredholmSystem { kernel, source }, ramp))
}

pub fn solve_dissipationless(kernels: &KernelSet, settings: &SolverSettings, bc: VelocityBc) -> Result<Solution> {
    let (sys, ramp) = dissipationless_system(kernels, settings, bc)?;
    let (q, mut report) = sys.neumann(settings.series_terms, settings.tol)?;
    report.method = "dissipationless_neumann".into();
    let v = (q + ramp).as_slice().to_vec();
    Ok(Solution { trajectory: Trajectory::from_velocity(&kernels.grid, v)?, report })
}

/// Picard iteration on the full equation
/// λ v̈ = -η₁[x] - ζ₁[x] v + ∫φ(t-s) v(s) ds.
///
/// Each sweep is v ← α + γt + ∫₀ᵗ(t-s) f(s) ds with γ fixed by v(t_f) = β,
/// written through the two-point Green's function. The relaxation factor is
/// halved (down to 1/16) whenever the update grows.
pub fn solve_nonlinear_picard(
    kernels: &KernelSet,
    channels: &BathChannels,
    settings: &SolverSettings,
    bc: VelocityBc,
) -> Result<Solution> {
    settings.validate()?;
    check_kernels(kernels)?;
    let grid = kernels.grid;
    let w = grid.weights();
    let h = grid.h();
    let gw = scale_columns(green_matrix(&grid, settings.lambda), &w);
    let phiw = scale_columns(lag_matrix(&kernels.phi), &w);
    let ramp = bc.ramp(&grid);
    let mut v = ramp.clone();
    let mut omega = settings.relaxation;
    let mut history = Vec::new();
    let mut prev = f64::INFINITY;
    for _ in 0..settings.picard_iters {
        let x = cumulative_trapezoid(v.as_slice(), h);
        let (eta1, zeta1) = eval_eta1_zeta1_all(&grid, channels, &x)?;
        let mut rhs = &phiw * &v;
        for i in 0..grid.n_t {
            rhs[i] -= eta1[i] + zeta1[i] * v[i];
        }
        let next = &ramp + &gw * rhs;
        let update = (&next - &v).amax();
        history.push(update);
        if update > prev {
            omega = (0.5 * omega).max(1.0 / 16.0);
        }
        prev = update;
        v += (next - &v) * omega;
        if update < settings.tol {
            let report = SolveReport {
                method: "picard".into(),
                terms_used: history.len(),
                last_update: update,
                fredholm_residual: update,
                iteration_history: history,
            };
            let traj = Trajectory::from_velocity(&grid, v.as_slice().to_vec())?;
            return Ok(Solution { trajectory: traj, report });
        }
    }
    Err(Error::NonConvergence {
        method: "picard",
        iterations: history.len(),
        last_update: prev,
        history,
    })
}
