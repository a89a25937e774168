use num_bigint::BigUint;
use thiserror::Error;

/// Errors shared across the toolkit.
///
/// `Domain` covers precondition violations on individual operations;
/// `Resource` means a configured memory or search budget was exceeded and
/// maps to a distinct process exit code in the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{n} is not a multiple of the gcd E_k = {e_k} of the k'th powers")]
    NotMultipleOfGcd { n: BigUint, e_k: BigUint },

    #[error("{n} lies at or below the Frobenius bound and has no representation")]
    BelowFrobeniusRange { n: BigUint },

    #[error("{v} is not representable as a sum of the scaled generators")]
    NotRepresentable { v: BigUint },

    #[error("value {n} exceeds the dynamic-programming limit {limit}")]
    LimitExceeded { n: BigUint, limit: u64 },

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// Must never fire on valid inputs; indicates an implementation bug.
    #[error("internal bound violation: {0}")]
    InternalBoundViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Exit status the CLI maps this error to (1 = domain, 2 = resource).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 2,
            _ => 1,
        }
    }
}
