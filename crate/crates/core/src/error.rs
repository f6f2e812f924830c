use thiserror::Error;

/// Errors raised by the library. Solver outcomes such as infeasibility are
/// reported through [`crate::SolveStatus`], not through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite component in quaternion ({0}, {1}, {2}, {3})")]
    NonFinite(f64, f64, f64, f64),

    #[error("unsupported norm order p = {0}; expected 1 or 2")]
    UnsupportedNorm(u32),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("malformed problem: {0}")]
    Malformed(String),

    #[error("invalid options: {0}")]
    Options(String),

    #[error("invalid trial or grid: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}
