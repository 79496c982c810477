//! Survival probability, protocol baselines and diagnostic checks.

use crate::bath::{min_sonic_bound, BathChannels};
use crate::error::{Error, Result};
use crate::kernels::GridSpec;
use crate::morse::{MatrixTables, MorseStructure};
use crate::solvers::Trajectory;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    pub trajectory: Trajectory,
    pub j_nonadiabatic: f64,
    pub j_bath: f64,
    pub survival: f64,
    pub adiabaticity_lhs: f64,
    pub adiabaticity_rhs: f64,
    pub speed_margin: f64,
    pub kinetic_integral: f64,
}

/// Trapezoid approximation of ∫₀^{t_f} e^{-iωτ} f(τ) dτ.
pub fn finite_time_ft(f: &[f64], omega: f64, grid: &GridSpec) -> Complex64 {
    let t = grid.times();
    let w = grid.weights();
    f.iter()
        .zip(t.iter().zip(&w))
        .map(|(&fi, (&ti, &wi))| Complex64::from_polar(wi * fi, -omega * ti))
        .sum()
}

fn check_grid(traj: &Trajectory) -> Result<GridSpec> {
    let n = traj.n_t();
    if n < 3 || traj.x.len() != n || traj.v.len() != n || traj.a.len() != n {
        return Err(Error::GridMismatch("trajectory arrays have inconsistent lengths".into()));
    }
    Ok(traj.grid())
}

/// V(gap_ε) for every ε node.
fn velocity_spectrum(traj: &Trajectory, tables: &MatrixTables, grid: &GridSpec) -> Vec<Complex64> {
    tables.gap.iter().map(|&g| finite_time_ft(&traj.v, g, grid)).collect()
}

pub fn j_nonadiabatic(traj: &Trajectory, tables: &MatrixTables) -> Result<f64> {
    let grid = check_grid(traj)?;
    let spec = velocity_spectrum(traj, tables, &grid);
    Ok((0..tables.n_eps())
        .map(|ie| tables.eps.weights[ie] * tables.mu_over_gap(ie).powi(2) * spec[ie].norm_sqr())
        .sum())
}

/// I_c = Σ_j w_j exp(-i[Ω̃ t_j + k x_j]) for every channel.
pub fn bath_amplitudes(traj: &Trajectory, channels: &BathChannels) -> Vec<Complex64> {
    let w = traj.grid().weights();
    (0..channels.len())
        .into_par_iter()
        .map(|c| {
            let om = channels.omega[c];
            let k = channels.k[c];
            (0..traj.n_t())
                .map(|j| Complex64::from_polar(w[j], -(om * traj.times[j] + k * traj.x[j])))
                .sum()
        })
        .collect()
}

pub fn j_bath(traj: &Trajectory, channels: &BathChannels) -> Result<f64> {
    check_grid(traj)?;
    let amps = bath_amplitudes(traj, channels);
    Ok(amps.iter().zip(&channels.weight).map(|(a, w)| w * a.norm_sqr()).sum())
}

fn assemble(
    traj: &Trajectory,
    tables: &MatrixTables,
    j_na: f64,
    j_b: f64,
) -> TransportResult {
    let (lhs, rhs, _) = adiabaticity_check(traj, tables, 3.0);
    let (max_v, min_vs, _) = speed_condition_check(traj, tables);
    TransportResult {
        trajectory: traj.clone(),
        j_nonadiabatic: j_na,
        j_bath: j_b,
        survival: (-j_na - j_b).exp(),
        adiabaticity_lhs: lhs,
        adiabaticity_rhs: rhs,
        speed_margin: min_vs - max_v,
        kinetic_integral: traj.kinetic_integral(),
    }
}

/// 𝒫 = exp(-J_na - J_bath) with the velocity-PSD and |I|² forms.
pub fn survival(traj: &Trajectory, tables: &MatrixTables, channels: &BathChannels) -> Result<TransportResult> {
    let j_na = j_nonadiabatic(traj, tables)?;
    let j_b = j_bath(traj, channels)?;
    Ok(assemble(traj, tables, j_na, j_b))
}

/// Non-adiabatic exponent with the counterdiabatic term -i m v̇ D added.
pub fn j_nonadiabatic_cdf(traj: &Trajectory, tables: &MatrixTables, structure: &MorseStructure) -> Result<f64> {
    let grid = check_grid(traj)?;
    let m = structure.trap.mass_m;
    Ok((0..tables.n_eps())
        .map(|ie| {
            let g = tables.gap[ie];
            let vv = finite_time_ft(&traj.v, g, &grid);
            let aa = finite_time_ft(&traj.a, g, &grid);
            let amp = vv * tables.mu_over_gap(ie) - Complex64::new(0.0, m * tables.dipole[ie]) * aa;
            tables.eps.weights[ie] * amp.norm_sqr()
        })
        .sum())
}

pub fn survival_cdf(
    traj: &Trajectory,
    tables: &MatrixTables,
    channels: &BathChannels,
    structure: &MorseStructure,
) -> Result<TransportResult> {
    let j_na = j_nonadiabatic_cdf(traj, tables, structure)?;
    let j_b = j_bath(traj, channels)?;
    Ok(assemble(traj, tables, j_na, j_b))
}

pub fn constant_speed(v_bar: f64, grid: &GridSpec) -> Trajectory {
    let times = grid.times();
    Trajectory {
        x: times.iter().map(|t| v_bar * t).collect(),
        v: vec![v_bar; grid.n_t],
        a: vec![0.0; grid.n_t],
        times,
    }
}

/// (max_t,ε |v μ/gap|, min_ε gap, lhs < rhs/threshold).
pub fn adiabaticity_check(traj: &Trajectory, tables: &MatrixTables, threshold: f64) -> (f64, f64, bool) {
    let coupling = (0..tables.n_eps()).map(|ie| tables.mu_over_gap(ie).abs()).fold(0.0, f64::max);
    let lhs = traj.max_speed() * coupling;
    let rhs = tables.min_gap();
    (lhs, rhs, lhs < rhs / threshold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfConditionReport {
    pub eps: Vec<f64>,
    pub per_eps: Vec<f64>,
    pub aggregate: f64,
    pub positive: bool,
}

/// Per-ε value of Re[2im(μD*/gap)·V A*] + m²|D|²|A|², A the transform of v̇.
pub fn cdf_condition_check(traj: &Trajectory, tables: &MatrixTables, structure: &MorseStructure) -> Result<CdfConditionReport> {
    let grid = check_grid(traj)?;
    let m = structure.trap.mass_m;
    let per_eps: Vec<f64> = (0..tables.n_eps())
        .map(|ie| {
            let g = tables.gap[ie];
            let d = tables.dipole[ie];
            let vv = finite_time_ft(&traj.v, g, &grid);
            let aa = finite_time_ft(&traj.a, g, &grid);
            let csd = vv * aa.conj();
            let cross = (Complex64::new(0.0, 2.0 * m * tables.mu_over_gap(ie) * d) * csd).re;
            cross + m * m * d * d * aa.norm_sqr()
        })
        .collect();
    let aggregate: f64 = per_eps.iter().zip(&tables.eps.weights).map(|(p, w)| p * w).sum();
    Ok(CdfConditionReport {
        eps: tables.eps.nodes.clone(),
        per_eps,
        aggregate,
        positive: aggregate > 0.0,
    })
}

/// (max |v|, min v_s, max |v| < min v_s).
pub fn speed_condition_check(traj: &Trajectory, tables: &MatrixTables) -> (f64, f64, bool) {
    let max_v = traj.max_speed();
    let min_vs = min_sonic_bound(tables);
    (max_v, min_vs, max_v < min_vs)
}

/// J_na as the symmetric double-time cosine sum (test oracle).
pub fn j_nonadiabatic_bruteforce(traj: &Trajectory, tables: &MatrixTables) -> f64 {
    let w = traj.grid().weights();
    let n = traj.n_t();
    let t = &traj.times;
    (0..tables.n_eps())
        .map(|ie| {
            let g = tables.gap[ie];
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += w[i] * w[j] * traj.v[i] * traj.v[j] * (g * (t[i] - t[j])).cos();
                }
            }
            tables.eps.weights[ie] * tables.mu_over_gap(ie).powi(2) * acc
        })
        .sum()
}

/// J_bath as twice the ordered double integral ∫dt₁∫₀^{t₁}dt₂ cos[A(t₁) - A(t₂)],
/// both levels by trapezoid (test oracle).
pub fn j_bath_bruteforce(traj: &Trajectory, channels: &BathChannels) -> f64 {
    let n = traj.n_t();
    let h = traj.t_f() / (n - 1) as f64;
    let w = traj.grid().weights();
    (0..channels.len())
        .map(|c| {
            let phase: Vec<f64> = (0..n)
                .map(|j| channels.omega[c] * traj.times[j] + channels.k[c] * traj.x[j])
                .collect();
            let mut outer = 0.0;
            for i in 1..n {
                let mut inner = 0.0;
                for j in 0..=i {
                    let wj = if j == 0 || j == i { 0.5 * h } else { h };
                    inner += wj * (phase[i] - phase[j]).cos();
                }
                outer += w[i] * inner;
            }
            channels.weight[c] * 2.0 * outer
        })
        .sum()
}

/// Objective whose first variation the optimal trajectory should cancel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// J_na + J_bath + λ∫v²; its gradient is compared modulo a + bt.
    Dissipative { lambda: f64 },
    /// J_na + λ∫v̇² + λ₁∫v; bath ignored.
    Dissipationless { lambda: f64, lambda1: f64 },
}

/// Discrete objective value.
pub fn objective_value(traj: &Trajectory, tables: &MatrixTables, channels: &BathChannels, obj: Objective) -> Result<f64> {
    let w = traj.grid().weights();
    let h = traj.t_f() / (traj.n_t() - 1) as f64;
    let j_na = j_nonadiabatic(traj, tables)?;
    Ok(match obj {
        Objective::Dissipative { lambda } => {
            j_na + j_bath(traj, channels)? + lambda * traj.v.iter().zip(&w).map(|(v, w)| w * v * v).sum::<f64>()
        }
        Objective::Dissipationless { lambda, lambda1 } => {
            let kin: f64 = traj.v.windows(2).map(|p| (p[1] - p[0]).powi(2) / h).sum();
            j_na + lambda * kin + lambda1 * traj.v.iter().zip(&w).map(|(v, w)| w * v).sum::<f64>()
        }
    })
}

/// Central-difference first variation with respect to interior velocity
/// nodes, divided by the node weight. Perturbing v_i by δ shifts x_i by
/// δh/2 and every later x_j by δh, so each channel is updated through
/// prefix and suffix sums.
pub fn stationarity_gradient(
    traj: &Trajectory,
    tables: &MatrixTables,
    channels: &BathChannels,
    obj: Objective,
    delta: f64,
) -> Result<Vec<f64>> {
    let grid = check_grid(traj)?;
    let n = grid.n_t;
    let h = grid.h();
    let w = grid.weights();
    let t = grid.times();
    let v = &traj.v;
    let mut grad = vec![0.0; n];

    // velocity-PSD part
    for ie in 0..tables.n_eps() {
        let g = tables.gap[ie];
        let coef = tables.eps.weights[ie] * tables.mu_over_gap(ie).powi(2);
        let vv = finite_time_ft(v, g, &grid);
        for i in 1..n - 1 {
            let dv = Complex64::from_polar(delta * w[i], -g * t[i]);
            grad[i] += coef * ((vv + dv).norm_sqr() - (vv - dv).norm_sqr());
        }
    }

    if let Objective::Dissipative { .. } = obj {
        let idx: Vec<usize> = (0..channels.len()).collect();
        let partials: Vec<Vec<f64>> = idx
            .par_chunks(256)
            .map(|chunk| {
                let mut acc = vec![0.0; n];
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                let mut suffix = vec![Complex64::new(0.0, 0.0); n + 1];
                for &c in chunk {
                    let (om, k, wc) = (channels.omega[c], channels.k[c], channels.weight[c]);
                    for j in 0..n {
                        e[j] = Complex64::from_polar(w[j], -(om * t[j] + k * traj.x[j]));
                    }
                    for j in (0..n).rev() {
                        suffix[j] = suffix[j + 1] + e[j];
                    }
                    let half = Complex64::from_polar(1.0, -k * delta * h / 2.0);
                    let full = half * half;
                    let mut prefix = e[0];
                    for i in 1..n - 1 {
                        let plus = prefix + e[i] * half + suffix[i + 1] * full;
                        let minus = prefix + e[i] * half.conj() + suffix[i + 1] * full.conj();
                        acc[i] += wc * (plus.norm_sqr() - minus.norm_sqr());
                        prefix += e[i];
                    }
                }
                acc
            })
            .collect();
        for p in partials {
            for i in 0..n {
                grad[i] += p[i];
            }
        }
    }

    for i in 1..n - 1 {
        grad[i] += match obj {
            Objective::Dissipative { lambda } => lambda * w[i] * 4.0 * v[i] * delta,
            Objective::Dissipationless { lambda, lambda1 } => {
                // λ Σ(Δv)²/h and λ₁ Σ w v
                let d_kin = 4.0 * delta * (2.0 * v[i] - v[i - 1] - v[i + 1]) / h;
                lambda * d_kin + lambda1 * 2.0 * delta * w[i]
            }
        };
    }
    let mut out: Vec<f64> = (1..n - 1).map(|i| grad[i] / (2.0 * delta * w[i])).collect();
    if let Objective::Dissipative { .. } = obj {
        project_off_affine(&mut out, &t[1..n - 1]);
    }
    Ok(out)
}

/// Removes the least-squares a + bt component.
pub fn project_off_affine(g: &mut [f64], t: &[f64]) {
    let n = g.len() as f64;
    let st: f64 = t.iter().sum();
    let stt: f64 = t.iter().map(|x| x * x).sum();
    let sg: f64 = g.iter().sum();
    let stg: f64 = t.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
    let det = n * stt - st * st;
    let b = (n * stg - st * sg) / det;
    let a = (sg - b * st) / n;
    for (gi, ti) in g.iter_mut().zip(t) {
        *gi -= a + b * ti;
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ft_of_constants() {
        let g = GridSpec::new(1.0, 2001).unwrap();
        assert_eq!(finite_time_ft(&[0.0; 2001], 2.0, &g), Complex64::new(0.0, 0.0));
        let one = vec![1.0; 2001];
        assert_relative_eq!(finite_time_ft(&one, 0.0, &g).re, 1.0, max_relative = 1e-12);
        let exact = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -2.0).exp()) / Complex64::new(0.0, 2.0);
        assert!((finite_time_ft(&one, 2.0, &g) - exact).norm() < 1e-6);
    }

    #[test]
    fn affine_projection_kills_lines() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let mut g: Vec<f64> = t.iter().map(|x| 3.0 - 2.0 * x).collect();
        project_off_affine(&mut g, &t);
        assert!(max_abs(&g) < 1e-12);
    }
}
