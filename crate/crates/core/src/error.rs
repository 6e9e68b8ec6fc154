use alloc::string::String;

/// Errors raised by the core computations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The input is valid but the formula being applied does not cover it.
    #[error("not applicable: {0}")]
    NotApplicable(String),
    /// An internal consistency check failed.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    /// The curve dataset does not cover the requested level.
    #[error("dataset incomplete: level {level} exceeds completeness bound {bound}")]
    Incomplete { level: u64, bound: u64 },
    /// A curve label was not found.
    #[error("unknown curve label {0}")]
    UnknownCurve(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
