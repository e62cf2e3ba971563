use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("mixed-degree input: {0}")]
    MixedDegree(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("matrix is not Hermitian: {0}")]
    NonHermitian(String),

    #[error("matrices do not commute: max defect {0:.3e}")]
    NonCommuting(f64),

    #[error("solver failure ({status}): {detail}")]
    Solver { status: String, detail: String },

    #[error("problem infeasible")]
    Infeasible,

    #[error("verification failure: {0}")]
    Verification(String),

    #[error("unknown fixture: {0}")]
    UnknownFixture(String),

    #[error("exact arithmetic unavailable: {0}")]
    ExactUnavailable(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
