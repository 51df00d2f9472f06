use thiserror::Error;

/// Errors raised by the channel, capacity, code and robustification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("{what} needs about {ops:.3e} elementary operations, budget is {budget:.3e}")]
    Budget { what: String, ops: f64, budget: f64 },

    #[error("typical set is empty for n = {n}, delta = {delta}; raise delta")]
    EmptyTypicalSet { n: usize, delta: f64 },

    #[error("structural precondition failed: {0}")]
    Structural(String),

    #[error("spec file: {0}")]
    SpecFile(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
