use thiserror::Error;

use crate::scalar::ParseError;

/// Errors surfaced by the library. Vertex indices are zero-based.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error {0}")]
    Parse(#[from] ParseError),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("rank {0} exceeds the supported maximum of {max}", max = crate::braiding::MAX_RANK)]
    RankTooLarge(usize),
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("m_ij is only defined for i != j (got i = j = {0})")]
    DiagonalQuery(usize),
    #[error("vertex {0} is not reflectable: some m_ij is undefined")]
    NotReflectable(usize),
    #[error("vector length {found} does not match rank {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("composition undefined: t(F) != E")]
    UndefinedComposition,
    #[error("groupoid element is not invertible over Z: {0}")]
    NotUnimodular(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
