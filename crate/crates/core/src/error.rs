use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Gamma pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("invalid trap: {0}")]
    InvalidTrap(String),
    #[error("trap holds more than one bound state (N = {n_param:.6}, need N < 1)")]
    MultipleStates { n_param: f64 },
    #[error("trap holds no bound state (N = {n_param:.6}, need N > 0)")]
    NoBoundState { n_param: f64 },
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("{method} did not converge after {iterations} steps (last update {last_update:.3e})")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        last_update: f64,
        history: Vec<f64>,
    },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("final position {achieved:.10} misses target {target:.10}")]
    BoundaryMiss { achieved: f64, target: f64 },
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. }
                | Error::NonConvergence { .. }
                | Error::BoundaryMiss { .. }
                | Error::Domain(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
