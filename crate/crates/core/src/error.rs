use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    #[error("constraint block B is rank-deficient: {0}")]
    RankDeficientConstraint(String),

    #[error("singular V-block restricted to ker B: {0}")]
    SingularVBlock(String),

    #[error("V-block is not positive definite; use the direct solver path: {0}")]
    VBlockIndefinite(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("iterative solver did not converge: {0}")]
    NoConvergence(String),

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error("time step failed at step {step} (t = {time}): {source}")]
    StepFailed {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
