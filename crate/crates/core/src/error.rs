use thiserror::Error;

use crate::algebra::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported modulus {0}: expected a prime or a prime power below 2^32")]
    BadModulus(u64),
    #[error("modulus {0} is not prime; this operation needs a field")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("coefficient rings differ: {0} vs {1}")]
    RingMismatch(u64, u64),
    #[error("residue {value} is not reduced modulo {modulus}")]
    Unreduced { value: u64, modulus: u64 },
    #[error("search budget exceeded: {needed} steps required, limit is {limit}")]
    BudgetExceeded { needed: u128, limit: u64 },
    #[error("matrix is not invertible")]
    Singular,
    #[error("table is not in normalized form (first basis vector must be the identity)")]
    NotNormalized,
    #[error("algebra is not local with residue field F_p")]
    NotLocal,
    #[error("structure table violates {} defining identities (first: {})", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent canonical data: {0}")]
    Inconsistent(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
