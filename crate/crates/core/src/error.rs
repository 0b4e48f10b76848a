use num_bigint::BigInt;
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("support cap exceeded: point of height {height} > cap {cap}")]
    SupportCapExceeded { height: BigInt, cap: u64 },

    #[error("degree error: expected degree {expected}, got {found}")]
    Degree { expected: Box<Rational>, found: Box<Rational> },

    #[error("rank mismatch: expected rank {expected}, got {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no certificate found within caps {caps_tried:?} (inconclusive, not a refutation)")]
    NotFoundWithinCaps { caps_tried: Vec<u64> },

    #[error("membership window too large: {monomials} monomials x {columns} columns")]
    WindowTooLarge { monomials: usize, columns: usize },

    #[error("certificate failed re-verification: {0}")]
    CertificateRejected(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
