use thiserror::Error;

use crate::bases::BasisId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude vector length {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),
    #[error("state vector has zero norm")]
    ZeroVector,
    #[error("state vector norm {0} is not within 1e-6 of 1")]
    NotNormalized(f64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("invalid single-qubit basis: {0}")]
    InvalidQubitBasis(String),
    #[error("a basis family needs at least 2 members, got {0}")]
    FamilyTooSmall(usize),
    #[error("invalid basis id {id:?} for n={n}, m={m}")]
    InvalidBasisId { id: BasisId, n: usize, m: usize },
    #[error("white-noise weight {0} outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("invalid counts data: {0}")]
    InvalidCounts(String),
    #[error("missing required basis {0:?}")]
    MissingBasis(BasisId),
    #[error("phase system is empty")]
    EmptySystem,
    #[error("null child passed to build_system at j={j}, beta={beta}")]
    NullChild { j: usize, beta: usize },
    #[error("ambiguous phase at j={j}, beta={beta} (condition number {cond:e})")]
    Ambiguous { j: usize, beta: usize, cond: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
