//! Bogoliubov phonon bath: units, dispersion, Fröhlich weight, sonic bound.

use crate::error::{Error, Result};
use crate::morse::{MatrixTables, MorseStructure};
use crate::quadrature::{composite_gauss_legendre, symmetric_gauss_legendre, Rule};
use serde::{Deserialize, Serialize};

/// ħ = m_B = ξ = 1, which fixes c = 1/√2 and t_B = ξ/(√2 c) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub xi: f64,
    pub t_b: f64,
    pub m_b: f64,
    pub c_sound: f64,
}

pub const C_SOUND: f64 = std::f64::consts::FRAC_1_SQRT_2;

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem { xi: 1.0, t_b: 1.0, m_b: 1.0, c_sound: C_SOUND }
    }
}

impl UnitSystem {
    pub fn is_consistent(&self) -> bool {
        let tb = self.xi / (std::f64::consts::SQRT_2 * self.c_sound);
        (tb - self.t_b).abs() < 1e-15 && (self.t_b / (self.xi * self.xi) - 1.0).abs() < 1e-15
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub g_tilde: f64,
    #[serde(default = "default_cutoff")]
    pub eps_max: f64,
    #[serde(default = "default_cutoff")]
    pub k_max: f64,
    #[serde(default = "default_nodes")]
    pub n_eps: usize,
    #[serde(default = "default_nodes")]
    pub n_k: usize,
}

fn default_cutoff() -> f64 {
    5.0
}
fn default_nodes() -> usize {
    200
}

impl BathSpec {
    pub fn new(g_tilde: f64) -> Self {
        BathSpec { g_tilde, eps_max: 5.0, k_max: 5.0, n_eps: 200, n_k: 200 }
    }

    pub fn with_nodes(mut self, n_eps: usize, n_k: usize) -> Self {
        self.n_eps = n_eps;
        self.n_k = n_k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g_tilde >= 0.0 && self.g_tilde.is_finite()) {
            return Err(Error::config("bath.g_tilde", "must be finite and >= 0"));
        }
        if !(self.eps_max > 0.0) {
            return Err(Error::config("bath.eps_max", "must be > 0"));
        }
        if !(self.k_max > 0.0) {
            return Err(Error::config("bath.k_max", "must be > 0"));
        }
        if self.n_eps < 8 || self.n_k < 8 || self.n_k % 2 != 0 {
            return Err(Error::config("bath.n_eps/n_k", "need n_eps, n_k >= 8 and n_k even"));
        }
        Ok(())
    }

    pub fn eps_rule(&self) -> Result<Rule> {
        composite_gauss_legendre(0.0, self.eps_max, self.n_eps)
            .map_err(|e| Error::config("bath.n_eps", e.to_string()))
    }

    pub fn k_rule(&self) -> Result<Rule> {
        symmetric_gauss_legendre(self.k_max, self.n_k)
            .map_err(|e| Error::config("bath.n_k", e.to_string()))
    }

    /// W_g(k) = g̃²·√(k²/(k²+2)).
    pub fn coupling_weight(&self, k: f64) -> Result<f64> {
        if k == 0.0 {
            return Err(Error::Domain("coupling weight undefined at k = 0".into()));
        }
        Ok(self.g_tilde * self.g_tilde * (k * k / (k * k + 2.0)).sqrt())
    }
}

/// Ω_k = c|k|√(1 + k²/2).
pub fn dispersion(k: f64) -> f64 {
    C_SOUND * k.abs() * (1.0 + 0.5 * k * k).sqrt()
}

/// v_s(ε, k) = |(gap(ε) + Ω_k)/k|.
pub fn sonic_bound(structure: &MorseStructure, k: f64, eps: f64) -> Result<f64> {
    if k == 0.0 {
        return Err(Error::Domain("sonic bound undefined at k = 0".into()));
    }
    if eps < 0.0 {
        return Err(Error::Domain(format!("ε must be >= 0, got {eps}")));
    }
    Ok(((structure.gap(eps) + dispersion(k)) / k).abs())
}

pub fn min_sonic_bound(tables: &MatrixTables) -> f64 {
    let mut best = f64::INFINITY;
    for &g in &tables.gap {
        for &k in &tables.k.nodes {
            best = best.min(((g + dispersion(k)) / k).abs());
        }
    }
    best
}

/// Flattened (ε, k) channels with the full spectral weight
/// w_ε·w_k·W_g(k)·|d|² folded in. Zero-weight channels are dropped.
#[derive(Debug, Clone, Default)]
pub struct BathChannels {
    pub weight: Vec<f64>,
    pub omega: Vec<f64>,
    pub k: Vec<f64>,
}

impl BathChannels {
    pub fn build(tables: &MatrixTables, bath: &BathSpec) -> Result<Self> {
        let mut ch = BathChannels::default();
        for ie in 0..tables.n_eps() {
            for (ik, &k) in tables.k.nodes.iter().enumerate() {
                let w = tables.eps.weights[ie]
                    * tables.k.weights[ik]
                    * bath.coupling_weight(k)?
                    * tables.d_abs_sq_at(ie, ik);
                if w != 0.0 {
                    ch.weight.push(w);
                    ch.omega.push(tables.gap[ie] + dispersion(k));
                    ch.k.push(k);
                }
            }
        }
        Ok(ch)
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }
}
