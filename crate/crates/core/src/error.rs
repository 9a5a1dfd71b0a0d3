use std::io;

use thiserror::Error;

/// Errors produced by graph certification, simulation and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exhaustive check refused: {vertices} vertices exceeds limit of {limit}")]
    SizeLimit { vertices: usize, limit: usize },

    #[error("agent {agent} has {neighbors} neighbors, at least {required} required for F-trimming")]
    ProtocolViolation {
        agent: usize,
        neighbors: usize,
        required: usize,
    },

    #[error("adversary budget violated at agent {agent} in round {round}: no regular value brackets a surviving adversarial value")]
    AdversaryBudgetViolated { agent: usize, round: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("degenerate objective: total curvature is zero")]
    DegenerateObjective,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("assumption check failed: {0}")]
    AssumptionFailed(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
