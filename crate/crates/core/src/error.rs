use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A state lies outside the domain of the map.
    #[error("state outside domain of `{system}`: {reason}")]
    Domain { system: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A bound was requested outside the regime where it holds.
    #[error("{bound} requires {requirement}")]
    Regime {
        bound: &'static str,
        requirement: String,
    },

    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("schedule gate: {0}")]
    ScheduleGate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("solver did not converge after {iterations} iterations (gradient sup-norm {gradient_norm:e})")]
    NonConvergence {
        iterations: usize,
        gradient_norm: f64,
        last_iterate: Vec<f64>,
    },

    #[error("coordinate {coordinate}: {source}")]
    Coordinate {
        coordinate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerical(_) | Error::NonConvergence { .. } => true,
            Error::Coordinate { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
