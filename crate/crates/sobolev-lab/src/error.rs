use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gradient unavailable: {0}")]
    GradientUnavailable(String),

    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    /// Partial sums exceeded the divergence sentinel or a radial integral
    /// left the configured radius bound.
    #[error("measure diverged: {0}")]
    Divergence(String),

    #[error("support not contained: {0}")]
    SupportNotContained(String),

    #[error("config error at line {line}: key `{key}`: {reason}")]
    Config {
        line: usize,
        key: String,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
