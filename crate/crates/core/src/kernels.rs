//! Memory kernels of the Euler-Lagrange equation.

use crate::bath::BathChannels;
use crate::error::{Error, Result};
use crate::morse::MatrixTables;
use crate::quadrature::trapezoid_weights;
use crate::solvers::Trajectory;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Uniform time grid on [0, t_f] with endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_f: f64,
    #[serde(default = "default_nt")]
    pub n_t: usize,
}

fn default_nt() -> usize {
    200
}

impl GridSpec {
    pub fn new(t_f: f64, n_t: usize) -> Result<Self> {
        let g = GridSpec { t_f, n_t };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_f > 0.0 && self.t_f.is_finite()) {
            return Err(Error::config("grid.t_f", "must be positive and finite"));
        }
        if self.n_t < 33 {
            return Err(Error::config("grid.n_t", "need at least 33 time nodes"));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.t_f / (self.n_t - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.n_t)
            .map(|i| if i + 1 == self.n_t { self.t_f } else { h * i as f64 })
            .collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n_t, self.h())
    }
}

/// η and ζ on the time grid; φ and φ₁ on the lag grid {j·h}.
#[derive(Debug, Clone)]
pub struct KernelSet {
    pub grid: GridSpec,
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi1: Vec<f64>,
}

impl KernelSet {
    pub fn build(grid: GridSpec, tables: &MatrixTables, channels: &BathChannels) -> Self {
        let (eta, zeta) = build_eta_zeta(&grid, channels);
        KernelSet {
            grid,
            eta,
            zeta,
            phi: build_phi(&grid, tables),
            phi1: build_phi1(&grid, tables),
        }
    }

    pub fn phi_at(&self, lag: f64) -> f64 {
        interp_lag(&self.phi, self.grid.h(), lag)
    }

    pub fn phi1_at(&self, lag: f64) -> f64 {
        interp_lag(&self.phi1, self.grid.h(), lag)
    }

    /// Dense Φ_ij = φ(t_i - t_j).
    pub fn phi_matrix(&self) -> Vec<Vec<f64>> {
        toeplitz(&self.phi)
    }

    pub fn phi1_matrix(&self) -> Vec<Vec<f64>> {
        toeplitz(&self.phi1)
    }
}

fn toeplitz(lagged: &[f64]) -> Vec<Vec<f64>> {
    let n = lagged.len();
    (0..n)
        .map(|i| (0..n).map(|j| lagged[i.abs_diff(j)]).collect())
        .collect()
}

fn interp_lag(samples: &[f64], h: f64, lag: f64) -> f64 {
    let u = lag.abs() / h;
    let j = u.floor() as usize;
    if j + 1 >= samples.len() {
        return *samples.last().unwrap();
    }
    let f = u - j as f64;
    samples[j] * (1.0 - f) + samples[j + 1] * f
}

fn cosine_series(grid: &GridSpec, tables: &MatrixTables, weight: impl Fn(usize) -> f64) -> Vec<f64> {
    let h = grid.h();
    let amp: Vec<f64> = (0..tables.n_eps()).map(|ie| tables.eps.weights[ie] * weight(ie)).collect();
    (0..grid.n_t)
        .into_par_iter()
        .map(|j| {
            let lag = h * j as f64;
            amp.iter()
                .zip(&tables.gap)
                .map(|(&a, &g)| a * (g * lag).cos())
                .sum()
        })
        .collect()
}

/// φ(τ) = Σ w_ε μ² cos(gap·τ) on the lag grid.
pub fn build_phi(grid: &GridSpec, tables: &MatrixTables) -> Vec<f64> {
    cosine_series(grid, tables, |ie| tables.mu[ie] * tables.mu[ie])
}

/// φ₁(τ) = Σ w_ε (μ/gap)² cos(gap·τ) on the lag grid.
pub fn build_phi1(grid: &GridSpec, tables: &MatrixTables) -> Vec<f64> {
    cosine_series(grid, tables, |ie| tables.mu_over_gap(ie).powi(2))
}

/// η and ζ with the s-integral done in closed form.
pub fn build_eta_zeta(grid: &GridSpec, channels: &BathChannels) -> (Vec<f64>, Vec<f64>) {
    let t_f = grid.t_f;
    let pairs: Vec<(f64, f64)> = grid
        .times()
        .into_par_iter()
        .map(|t| {
            let mut eta = 0.0;
            let mut zeta = 0.0;
            for c in 0..channels.len() {
                let om = channels.omega[c];
                let k = channels.k[c];
                let w = channels.weight[c];
                let cc = ((om * t).sin() + (om * (t_f - t)).sin()) / om;
                eta += w * om * k * cc;
                zeta += w * k * k * cc;
            }
            (eta, zeta)
        })
        .collect();
    pairs.into_iter().unzip()
}

/// (1 - e^{-iΔ})/(iΔ), with a series near Δ = 0.
fn phase_cell_factor(d: f64) -> Complex64 {
    if d.abs() < 1e-3 {
        let z = Complex64::new(0.0, -d);
        // Σ z^n/(n+1)!
        Complex64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0 + z * z * z * z / 120.0
    } else {
        (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -d).exp()) / Complex64::new(0.0, d)
    }
}

const CHANNEL_CHUNK: usize = 512;

/// η₁ and ζ₁ on every grid node for the trajectory positions `x`.
///
/// The s-integral ∫₀^{t_f} e^{-iA(s)} ds, A = Ω̃s + k·x(s), is done cell by
/// cell treating A as linear inside each cell, which is exact when x is.
pub fn eval_eta1_zeta1_all(grid: &GridSpec, channels: &BathChannels, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = grid.n_t;
    if x.len() != n {
        return Err(Error::GridMismatch(format!("x has {} nodes, grid has {n}", x.len())));
    }
    let t = grid.times();
    let h = grid.h();
    let idx: Vec<usize> = (0..channels.len()).collect();
    let partials: Vec<(Vec<f64>, Vec<f64>)> = idx
        .par_chunks(CHANNEL_CHUNK)
        .map(|chunk| {
            let mut eta = vec![0.0; n];
            let mut zeta = vec![0.0; n];
            let mut ph = vec![Complex64::new(0.0, 0.0); n];
            for &c in chunk {
                let om = channels.omega[c];
                let k = channels.k[c];
                let w = channels.weight[c];
                let mut integral = Complex64::new(0.0, 0.0);
                let mut a_prev = 0.0;
                for i in 0..n {
                    let a = om * t[i] + k * x[i];
                    ph[i] = Complex64::from_polar(1.0, a);
                    if i > 0 {
                        integral += ph[i - 1].conj() * phase_cell_factor(a - a_prev);
                    }
                    a_prev = a;
                }
                integral *= h;
                let we = w * om * k;
                let wz = w * k * k;
                for i in 0..n {
                    let re = (ph[i] * integral).re;
                    eta[i] += we * re;
                    zeta[i] += wz * re;
                }
            }
            (eta, zeta)
        })
        .collect();
    let mut eta = vec![0.0; n];
    let mut zeta = vec![0.0; n];
    for (pe, pz) in partials {
        for i in 0..n {
            eta[i] += pe[i];
            zeta[i] += pz[i];
        }
    }
    Ok((eta, zeta))
}

/// η₁ and ζ₁ at a single time t ∈ [0, t_f].
pub fn eval_eta1_zeta1(grid: &GridSpec, channels: &BathChannels, traj: &Trajectory, t: f64) -> Result<(f64, f64)> {
    check_traj(grid, traj)?;
    let times = grid.times();
    let h = grid.h();
    let xt = traj.x_at(t);
    let mut eta = 0.0;
    let mut zeta = 0.0;
    for c in 0..channels.len() {
        let om = channels.omega[c];
        let k = channels.k[c];
        let mut integral = Complex64::new(0.0, 0.0);
        for i in 1..grid.n_t {
            let a0 = om * times[i - 1] + k * traj.x[i - 1];
            let a1 = om * times[i] + k * traj.x[i];
            integral += Complex64::from_polar(1.0, -a0) * phase_cell_factor(a1 - a0);
        }
        let re = (Complex64::from_polar(1.0, om * t + k * xt) * integral * h).re;
        eta += channels.weight[c] * om * k * re;
        zeta += channels.weight[c] * k * k * re;
    }
    Ok((eta, zeta))
}

/// K(t, t') = Σ w k W sin[Ω̃(t - t') + k(x(t) - x(t'))].
pub fn eval_k(channels: &BathChannels, traj: &Trajectory, t: f64, t_prime: f64) -> f64 {
    let dx = traj.x_at(t) - traj.x_at(t_prime);
    let dt = t - t_prime;
    (0..channels.len())
        .map(|c| channels.weight[c] * channels.k[c] * (channels.omega[c] * dt + channels.k[c] * dx).sin())
        .sum()
}

fn check_traj(grid: &GridSpec, traj: &Trajectory) -> Result<()> {
    if traj.x.len() != grid.n_t || (traj.t_f() - grid.t_f).abs() > 1e-12 * grid.t_f {
        return Err(Error::GridMismatch("trajectory and kernel grids differ".into()));
    }
    Ok(())
}
