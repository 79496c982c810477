//! JSON run configuration.

use crate::bath::{BathSpec, C_SOUND};
use crate::error::{Error, Result};
use crate::kernels::GridSpec;
use crate::morse::TrapSpec;
use crate::solvers::{SolverSettings, VelocityBc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    AcquditLinear,
    AcquditPicard,
    Dissipationless,
    ConstantSpeed,
    CdfOnOptimal,
}

/// Speeds are given in multiples of the sound speed c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BcConfig {
    Velocity {
        #[serde(default)]
        v0_c: f64,
        vf_c: f64,
    },
    Position { xf: f64 },
}

impl BcConfig {
    pub fn velocity(&self) -> Option<VelocityBc> {
        match *self {
            BcConfig::Velocity { v0_c, vf_c } => Some(VelocityBc::new(v0_c * C_SOUND, vf_c * C_SOUND)),
            BcConfig::Position { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub trap: TrapSpec,
    pub bath: BathSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverSettings,
    pub protocol: Protocol,
    pub bc: BcConfig,
    #[serde(default)]
    pub sweep: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::config("<json>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("trap.depth_d", self.trap.depth_d),
            ("trap.width_a", self.trap.width_a),
            ("trap.mass_m", self.trap.mass_m),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(name, "must be positive and finite"));
            }
        }
        self.bath.validate()?;
        self.grid.validate()?;
        self.solver.validate()?;
        if let BcConfig::Position { xf } = self.bc {
            if self.protocol != Protocol::AcquditLinear {
                return Err(Error::config("bc", "position boundary values are only supported by acqudit_linear"));
            }
            if !xf.is_finite() {
                return Err(Error::config("bc.xf", "must be finite"));
            }
        }
        if let Some(list) = &self.sweep {
            if list.is_empty() {
                return Err(Error::config("sweep", "list of t_f values is empty"));
            }
            if let Some(bad) = list.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
                return Err(Error::config("sweep", format!("t_f value {bad} must be positive")));
            }
        }
        Ok(())
    }

    /// t_f values to run: the sweep list, or the single grid t_f.
    pub fn t_f_values(&self) -> Vec<f64> {
        self.sweep.clone().unwrap_or_else(|| vec![self.grid.t_f])
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// sha256 of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "trap": {"depth_d": 2.0, "width_a": 1.0, "mass_m": 0.5},
        "bath": {"g_tilde": 1.0, "n_eps": 40, "n_k": 40},
        "grid": {"t_f": 1.0, "n_t": 64},
        "protocol": "acqudit_linear",
        "bc": {"kind": "velocity", "vf_c": 1.5}
    }"#;

    #[test]
    fn parses_with_defaults() {
        let c = RunConfig::from_json(SAMPLE).unwrap();
        assert_eq!(c.solver.series_terms, 50);
        assert_eq!(c.bath.eps_max, 5.0);
        assert!((c.bc.velocity().unwrap().vf - 1.5 * C_SOUND).abs() < 1e-15);
        assert_eq!(c.content_hash().len(), 64);
    }

    #[test]
    fn field_errors() {
        let bad = SAMPLE.replace("\"n_t\": 64", "\"n_t\": 10");
        match RunConfig::from_json(&bad) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "grid.n_t"),
            other => panic!("unexpected {other:?}"),
        }
        let pos = SAMPLE
            .replace("acqudit_linear", "acqudit_picard")
            .replace(r#"{"kind": "velocity", "vf_c": 1.5}"#, r#"{"kind": "position", "xf": 0.4}"#);
        assert!(RunConfig::from_json(&pos).is_err());
    }
}
