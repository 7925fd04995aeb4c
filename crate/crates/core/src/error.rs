use thiserror::Error;

/// Errors raised by the simulators and the metrology layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not unitary (max |U^dagger U - I| = {defect:.3e})")]
    NonUnitary { defect: f64 },

    #[error("truncation overflow: weight {weight:.3e} in the top Fock levels exceeds guard {guard:.1e}")]
    TruncationOverflow { weight: f64, guard: f64 },

    #[error("signal slope vanishes at evaluation point {eta0}")]
    DegenerateSlope { eta0: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
