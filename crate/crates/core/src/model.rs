//! Trap + bath bundle with cached matrix elements.

use crate::bath::{BathChannels, BathSpec};
use crate::error::Result;
use crate::fidelity::{self, TransportResult};
use crate::kernels::{GridSpec, KernelSet};
use crate::morse::{build_structure, MatrixTables, MorseStructure, TrapSpec};
use crate::solvers::{self, Solution, SolverSettings, Trajectory, VelocityBc};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct Model {
    pub structure: MorseStructure,
    pub bath: BathSpec,
    pub tables: Arc<MatrixTables>,
    pub channels: Arc<BathChannels>,
}

impl Model {
    pub fn new(trap: TrapSpec, bath: BathSpec) -> Result<Self> {
        bath.validate()?;
        let structure = build_structure(trap)?;
        let tables = MatrixTables::build(&structure, bath.eps_rule()?, bath.k_rule()?)?;
        let channels = BathChannels::build(&tables, &bath)?;
        Ok(Model {
            structure,
            bath,
            tables: Arc::new(tables),
            channels: Arc::new(channels),
        })
    }

    /// Same trap and spectral grid with a different coupling g̃.
    pub fn with_coupling(&self, g_tilde: f64) -> Result<Self> {
        let bath = BathSpec { g_tilde, ..self.bath };
        bath.validate()?;
        let channels = BathChannels::build(&self.tables, &bath)?;
        Ok(Model {
            structure: self.structure,
            bath,
            tables: Arc::clone(&self.tables),
            channels: Arc::new(channels),
        })
    }

    pub fn trap(&self) -> TrapSpec {
        self.structure.trap
    }

    pub fn kernels(&self, grid: GridSpec) -> Result<KernelSet> {
        grid.validate()?;
        Ok(KernelSet::build(grid, &self.tables, &self.channels))
    }

    pub fn solve_linear(&self, grid: GridSpec, settings: &SolverSettings, bc: VelocityBc) -> Result<Solution> {
        solvers::solve_linear(&self.kernels(grid)?, settings, bc)
    }

    pub fn solve_picard(&self, grid: GridSpec, settings: &SolverSettings, bc: VelocityBc) -> Result<Solution> {
        solvers::solve_nonlinear_picard(&self.kernels(grid)?, &self.channels, settings, bc)
    }

    pub fn solve_dissipationless(&self, grid: GridSpec, settings: &SolverSettings, bc: VelocityBc) -> Result<Solution> {
        solvers::solve_dissipationless(&self.kernels(grid)?, settings, bc)
    }

    pub fn solve_position_bc(&self, grid: GridSpec, settings: &SolverSettings, x_f: f64) -> Result<Solution> {
        solvers::solve_linear_position_bc(&self.kernels(grid)?, settings, x_f)
    }

    pub fn survival(&self, traj: &Trajectory) -> Result<TransportResult> {
        fidelity::survival(traj, &self.tables, &self.channels)
    }

    pub fn survival_cdf(&self, traj: &Trajectory) -> Result<TransportResult> {
        fidelity::survival_cdf(traj, &self.tables, &self.channels, &self.structure)
    }
}
