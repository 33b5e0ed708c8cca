//! Error type shared across the numeric core.

use core::fmt;

/// Errors raised by construction, preprocessing, projection,
/// sparsification, and evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    /// A NaN or infinite value was found at (row, col) of an input matrix.
    NonFiniteValue { row: usize, col: usize },
    /// Dataset with zero rows or zero columns.
    EmptyMatrix,
    /// Column `col` had zero mean after the shift step of the original
    /// preprocessing (i.e. the shifted column is all-zero).
    ZeroMeanColumn { col: usize },
    /// A vector that must be normalized or angle-compared has zero norm.
    /// `index` identifies the offending column/id where known.
    ZeroNormVector { index: usize },
    /// Operand dimensions disagree.
    DimensionMismatch { expected: usize, got: usize },
    /// k outside [1, dim] for a sparsifier, or K outside [1, N-1] for
    /// evaluation.
    BadK { k: usize, dim: usize },
    /// Requested exact row weight round(p*d) falls outside [1, d].
    InvalidRowWeight { weight: usize, cols: usize },
    /// Requested exact column weight round(p*D) falls outside [1, D].
    InvalidColWeight { weight: usize, rows: usize },
    /// Query id outside the dataset.
    BadId { id: usize, count: usize },
    /// Block prefix index outside [1, k].
    BadBlockIndex { index: usize, blocks: usize },
    /// Malformed sparse-matrix snapshot.
    BadSnapshot { reason: &'static str },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::NonFiniteValue { row, col } => {
                write!(f, "non-finite value at row {row}, col {col}")
            }
            CoreError::EmptyMatrix => write!(f, "empty matrix"),
            CoreError::ZeroMeanColumn { col } => {
                write!(f, "column {col} has zero mean after shift")
            }
            CoreError::ZeroNormVector { index } => {
                write!(f, "vector {index} has zero norm")
            }
            CoreError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            CoreError::BadK { k, dim } => write!(f, "invalid k={k} for dimension {dim}"),
            CoreError::InvalidRowWeight { weight, cols } => {
                write!(f, "invalid row weight {weight} for {cols} columns")
            }
            CoreError::InvalidColWeight { weight, rows } => {
                write!(f, "invalid column weight {weight} for {rows} rows")
            }
            CoreError::BadId { id, count } => {
                write!(f, "id {id} out of range for {count} vectors")
            }
            CoreError::BadBlockIndex { index, blocks } => {
                write!(f, "block prefix {index} out of range for {blocks} blocks")
            }
            CoreError::BadSnapshot { reason } => write!(f, "bad snapshot: {reason}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CoreError {}
