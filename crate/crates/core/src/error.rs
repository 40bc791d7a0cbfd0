use thiserror::Error;

use crate::scenario::ConfigError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("insufficient history: need at least {needed} points, have {got}")]
    InsufficientHistory { needed: usize, got: usize },
    #[error("degenerate direction: history has zero net displacement")]
    DegenerateDirection,
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("infeasible density: placed {placed} of {requested} trees after {attempts} attempts")]
    InfeasibleDensity {
        requested: usize,
        placed: usize,
        attempts: usize,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
