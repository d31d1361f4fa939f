use thiserror::Error;

/// Errors raised by model validation and the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    Model(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("pole of the gamma function at {0}")]
    Pole(f64),
    #[error("argument {value} outside the admissible strip ({lower}, {upper})")]
    Strip { value: f64, lower: f64, upper: f64 },
    #[error("no convergence: {what} (achieved error {achieved:e}, target {target:e})")]
    NoConvergence { what: String, achieved: f64, target: f64 },
    #[error("root bracketing failed: {0}")]
    Bracket(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("requested time {requested} exceeds the simulated horizon {horizon}")]
    Horizon { requested: f64, horizon: f64 },
    #[error("empty sample batch")]
    EmptyBatch,
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// `true` for failures of a numerical procedure (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Bracket(_) | Error::NoRoot(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
