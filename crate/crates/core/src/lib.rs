//! Optimal transport of a trapped impurity through a 1D phonon bath.
//!
//! The trajectory extremizes the loss of survival probability of the bound
//! state of a shallow Morse trap, built from non-adiabatic leakage into the
//! trap continuum and phonon emission into a Bogoliubov bath.

pub mod bath;
pub mod config;
pub mod error;
pub mod fidelity;
pub mod kernels;
pub mod model;
pub mod morse;
pub mod quadrature;
pub mod run;
pub mod solvers;
pub mod specfun;
pub mod validate;

pub use bath::{BathChannels, BathSpec, UnitSystem, C_SOUND};
pub use config::{BcConfig, Protocol, RunConfig};
pub use error::{Error, Result};
pub use fidelity::TransportResult;
pub use kernels::{GridSpec, KernelSet};
pub use model::Model;
pub use morse::{build_structure, MatrixTables, MorseStructure, TrapSpec};
pub use solvers::{Solution, SolverSettings, Trajectory, VelocityBc};
