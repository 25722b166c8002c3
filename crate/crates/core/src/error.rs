use thiserror::Error;

/// Errors produced by model construction and oracle computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("agent {agent}: {detail}")]
    Validation { agent: usize, detail: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index out of range: {0}")]
    IndexRange(String),

    #[error("chain is not ergodic: {0}")]
    NonErgodic(String),

    #[error("problem size {size} exceeds guard {limit}")]
    SizeGuard { size: u128, limit: u128 },

    #[error("operation does not apply to this model class: {0}")]
    ModelClass(String),

    #[error(
        "agent {agent}: local pair {pair} has zero stationary mass, conditional weights undefined"
    )]
    UnreachableLocalPair { agent: usize, pair: usize },

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("iteration did not converge: {0}")]
    NonConverged(String),

    #[error("model file: {0}")]
    ModelFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
