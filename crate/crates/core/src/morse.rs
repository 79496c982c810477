//! Morse trap with a single bound state: eigenstructure and the
//! bound-to-continuum matrix elements.

use crate::error::{Error, Result};
use crate::quadrature::Rule;
use crate::specfun::{complex_gamma, ln_abs_gamma, ln_gamma_real, ComplexScalar};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Scaled trap parameters: depth D' (1/t_B), width a' (1/ξ), mass m' (m_B).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    #[serde(alias = "depth_D")]
    pub depth_d: f64,
    pub width_a: f64,
    pub mass_m: f64,
}

impl TrapSpec {
    pub fn new(depth_d: f64, width_a: f64, mass_m: f64) -> Self {
        TrapSpec { depth_d, width_a, mass_m }
    }

    /// Largest depth that still binds exactly one state.
    pub fn max_single_state_depth(&self) -> f64 {
        9.0 * self.width_a * self.width_a / (8.0 * self.mass_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorseStructure {
    pub n_param: f64,
    pub omega_bound: f64,
    pub bound_norm: f64,
    pub trap: TrapSpec,
}

pub fn build_structure(trap: TrapSpec) -> Result<MorseStructure> {
    let TrapSpec { depth_d: d, width_a: a, mass_m: m } = trap;
    for (name, v) in [("depth_D", d), ("width_a", a), ("mass_m", m)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidTrap(format!("{name} must be positive and finite, got {v}")));
        }
    }
    let n_param = (2.0 * m * d).sqrt() / a - 0.5;
    // Compare depths rather than N so the gate is exactly D < 9a²/8m.
    if d >= trap.max_single_state_depth() {
        return Err(Error::MultipleStates { n_param });
    }
    if d <= a * a / (8.0 * m) {
        return Err(Error::NoBoundState { n_param });
    }
    let omega_bound = -a * a * n_param * n_param / (2.0 * m);
    let bound_norm = (2.0 * n_param / ln_gamma_real(2.0 * n_param + 1.0)?.exp()).sqrt();
    Ok(MorseStructure { n_param, omega_bound, bound_norm, trap })
}

impl MorseStructure {
    /// ω_ε = a²ε²/2m.
    pub fn continuum_frequency(&self, eps: f64) -> f64 {
        let a = self.trap.width_a;
        a * a * eps * eps / (2.0 * self.trap.mass_m)
    }

    /// Transition frequency ω_ε - ω₀ > 0.
    pub fn gap(&self, eps: f64) -> f64 {
        self.continuum_frequency(eps) - self.omega_bound
    }

    /// Continuum normalization 𝒩(κ); zero at κ = 0.
    pub fn continuum_norm(&self, kappa: f64) -> f64 {
        if kappa <= 0.0 {
            return 0.0;
        }
        let n = self.n_param;
        let lg = ln_abs_gamma(Complex64::new(-n, -kappa)).expect("-N - iκ is not a pole for κ > 0");
        (lg + 0.5 * kappa.ln() + 0.5 * ln_sinh(2.0 * PI * kappa) - PI.ln()).exp()
    }

    /// Non-adiabatic coupling μ(κ).
    pub fn mu_nonadiabatic(&self, kappa: f64) -> f64 {
        if kappa <= 0.0 {
            return 0.0;
        }
        let n = self.n_param;
        let d = self.trap.depth_d;
        let two_n1 = 2.0 * n + 1.0;
        // |Γ(N+2+iκ)|² - (2N+1)|Γ(N+1+iκ)|² = |Γ(N+1+iκ)|²·(N² + κ²)
        let g1 = (2.0 * ln_abs_gamma(Complex64::new(n + 1.0, kappa)).unwrap()).exp();
        let bracket = g1 * (n * n + kappa * kappa);
        2.0 * d * self.bound_norm * self.continuum_norm(kappa) / (two_n1 * two_n1) * bracket
    }

    /// Phonon matrix element d(ε, k) = conj(A₀(ε, k)).
    pub fn d_phonon(&self, eps: f64, k: f64) -> Result<ComplexScalar> {
        check_eps_k(eps, k)?;
        let n = self.n_param;
        let g2n1 = ln_gamma_real(2.0 * n + 1.0)?.exp();
        let pre = (2.0 * n * g2n1 * eps * (2.0 * PI * eps).sinh()).sqrt();
        let phase = Complex64::new(0.0, k * (2.0 * n + 1.0).ln()).exp();
        let abs_g = ln_abs_gamma(Complex64::new(-n, eps))?.exp();
        let denom = Complex64::new(0.0, PI * PI * g2n1);
        let prod = complex_gamma(Complex64::new(1.0, k))?
            * complex_gamma(Complex64::new(n, -eps - k))?
            * complex_gamma(Complex64::new(n, eps - k))?;
        let a0 = pre * phase * (PI * k).sinh() * abs_g / denom * prod;
        Ok(a0.conj())
    }

    /// |d(ε, k)|² from Gamma moduli only.
    pub fn d_abs_sq(&self, eps: f64, k: f64) -> Result<f64> {
        check_eps_k(eps, k)?;
        let n = self.n_param;
        let ln_g2n1 = ln_gamma_real(2.0 * n + 1.0)?;
        let lv = (2.0 * n * eps).ln() + ln_sinh(2.0 * PI * eps) + 2.0 * ln_sinh(PI * k.abs())
            + 2.0 * ln_abs_gamma(Complex64::new(-n, eps))?
            + 2.0 * ln_abs_gamma(Complex64::new(1.0, k))?
            + 2.0 * ln_abs_gamma(Complex64::new(n, -eps - k))?
            + 2.0 * ln_abs_gamma(Complex64::new(n, eps - k))?
            - 4.0 * PI.ln()
            - ln_g2n1;
        Ok(lv.exp())
    }

    /// Dipole element D₀ε (real, negative).
    pub fn dipole(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("dipole needs ε > 0, got {eps}")));
        }
        let n = self.n_param;
        let ln_g2n1 = ln_gamma_real(2.0 * n + 1.0)?;
        let lv = ln_abs_gamma(Complex64::new(-n, eps))? - PI.ln() - (n * n + eps * eps).ln()
            + 0.5 * (eps.ln() + ln_sinh(2.0 * PI * eps) + (2.0 * n).ln() - ln_g2n1)
            + 2.0 * ln_abs_gamma(Complex64::new(1.0 + n, eps))?;
        Ok(-lv.exp())
    }
}

fn check_eps_k(eps: f64, k: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("ε must be > 0, got {eps}")));
    }
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Domain(format!("k must be finite and nonzero, got {k}")));
    }
    Ok(())
}

fn ln_sinh(u: f64) -> f64 {
    if u < 20.0 {
        u.sinh().ln()
    } else {
        u - std::f64::consts::LN_2 + (-(-2.0 * u).exp()).ln_1p()
    }
}

/// Matrix elements cached on the (ε, k) quadrature grid.
#[derive(Debug, Clone)]
pub struct MatrixTables {
    pub eps: Rule,
    pub k: Rule,
    pub gap: Vec<f64>,
    pub mu: Vec<f64>,
    pub dipole: Vec<f64>,
    /// Row-major, index `ie * n_k + ik`.
    pub d_abs_sq: Vec<f64>,
}

impl MatrixTables {
    pub fn build(structure: &MorseStructure, eps: Rule, k: Rule) -> Result<Self> {
        let gap: Vec<f64> = eps.nodes.iter().map(|&e| structure.gap(e)).collect();
        let mu: Vec<f64> = eps.nodes.iter().map(|&e| structure.mu_nonadiabatic(e)).collect();
        let dipole = eps
            .nodes
            .iter()
            .map(|&e| structure.dipole(e))
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<Vec<f64>> = eps
            .nodes
            .par_iter()
            .map(|&e| k.nodes.iter().map(|&kk| structure.d_abs_sq(e, kk)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let d_abs_sq: Vec<f64> = rows.into_iter().flatten().collect();
        if d_abs_sq.iter().chain(&mu).chain(&dipole).any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite matrix element on the spectral grid".into()));
        }
        Ok(MatrixTables { eps, k, gap, mu, dipole, d_abs_sq })
    }

    pub fn n_eps(&self) -> usize {
        self.eps.len()
    }

    pub fn n_k(&self) -> usize {
        self.k.len()
    }

    pub fn mu_over_gap(&self, ie: usize) -> f64 {
        self.mu[ie] / self.gap[ie]
    }

    pub fn min_gap(&self) -> f64 {
        self.gap.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn d_abs_sq_at(&self, ie: usize, ik: usize) -> f64 {
        self.d_abs_sq[ie * self.n_k() + ik]
    }
}
