use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("circle is not contained in the upper half-plane: {0}")]
    NotInUpperHalfPlane(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// The input set cannot answer the query without undercounting.
    #[error("incomplete enumeration: {0}")]
    Incomplete(String),

    #[error("curvature monotonicity violated: parent {parent}, child {child}")]
    MonotonicityViolated { parent: f64, child: f64 },

    #[error("exact arithmetic left the safe integer range")]
    Overflow,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
