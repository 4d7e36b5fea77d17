//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by graph construction, I/O, and the numeric routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("singular linear system (smallest singular value {smallest_singular:.3e})")]
    SingularSystem { smallest_singular: f64 },

    #[error("eigensolver did not converge (achieved residual {achieved:.3e}, wanted {wanted:.3e})")]
    EigenConvergence { achieved: f64, wanted: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
