use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field parameter d = {d}: {reason}")]
    InvalidField { d: i64, reason: &'static str },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("ideal is not principal")]
    NotPrincipal,
    #[error("generator search exceeded its budget of {0} candidates")]
    SearchBudget(u64),
    #[error("norm {0} is beyond the trial-division bound")]
    FactorBound(u128),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("element must be positive in the real embedding")]
    NonPositive,
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("s is at the pole s = 1")]
    PoleAt1,
    #[error("remainder estimate {remainder:e} exceeds tolerance {tol:e}")]
    ToleranceNotMet { remainder: f64, tol: f64 },
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::InvalidParam(msg.into())
}
