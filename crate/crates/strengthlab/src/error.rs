//! Shared error type for the whole crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime modulus out of range: {0} (need 2 <= p <= 2^31)")]
    ModulusOutOfRange(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("extension degree must be at least 2, got {0}")]
    InvalidDegree(u32),
    #[error("size cap exceeded: {what} needs {required}, cap is {cap}")]
    SizeCap {
        what: &'static str,
        required: u128,
        cap: u64,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("variable index out of range: x{index}, but n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("characteristic {p} too small for degree {degree} (need char > degree)")]
    CharTooSmall { p: u64, degree: u32 },
    #[error("polynomial is not homogeneous of degree {expected}")]
    NotHomogeneous { expected: u32 },
    #[error("wrong degree: expected {expected}, got {got}")]
    WrongDegree { expected: u32, got: u32 },
    #[error("characteristic 2 is not supported for quadratic forms")]
    CharTwo,
    #[error("rank undefined for degree <= 1 (rank requires degree >= 2)")]
    DegreeTooSmall,
    #[error("budget exceeded: {required} tuples required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("arity mismatch: form takes {expected} points, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("records have mixed parameters: {0}")]
    MixedParameters(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
