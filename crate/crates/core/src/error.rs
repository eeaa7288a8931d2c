use thiserror::Error;

/// Failures raised anywhere in the construction pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for table of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate point at n = {n}: {what}")]
    DegeneratePoint { n: usize, what: String },

    #[error("degenerate Sobolev data at n = {n}: boundary system is singular")]
    DegenerateSpec { n: usize },

    #[error("matrix is not positive definite: pivot {index} is {pivot}")]
    NotPositiveDefinite { index: usize, pivot: String },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("unsupported by the exact oracle: {0}")]
    UnsupportedByOracle(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_index(index: usize, size: usize) -> Result<()> {
    if index < size {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, size })
    }
}
