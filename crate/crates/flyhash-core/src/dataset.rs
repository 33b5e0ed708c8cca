//! Dense column-major datasets.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::CoreError;

/// A d x N real matrix whose columns are the input vectors, plus a text
/// tag naming the source. Immutable after construction; every entry is
/// validated finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseDataset {
    dims: usize,
    count: usize,
    /// Column-major: column j occupies values[j*dims .. (j+1)*dims].
    values: Vec<f64>,
    source_tag: String,
}

impl DenseDataset {
    /// Validates and wraps a column-major value buffer.
    pub fn new(
        dims: usize,
        count: usize,
        values: Vec<f64>,
        source_tag: &str,
    ) -> Result<Self, CoreError> {
        if dims == 0 || count == 0 {
            return Err(CoreError::EmptyMatrix);
        }
        if values.len() != dims * count {
            return Err(CoreError::DimensionMismatch {
                expected: dims * count,
                got: values.len(),
            });
        }
        for (idx, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::NonFiniteValue {
                    row: idx % dims,
                    col: idx / dims,
                });
            }
        }
        Ok(DenseDataset {
            dims,
            count,
            values,
            source_tag: String::from(source_tag),
        })
    }

    /// Builds from a list of equal-length column vectors.
    pub fn from_columns(columns: &[Vec<f64>], source_tag: &str) -> Result<Self, CoreError> {
        if columns.is_empty() || columns[0].is_empty() {
            return Err(CoreError::EmptyMatrix);
        }
        let dims = columns[0].len();
        let mut values = Vec::with_capacity(dims * columns.len());
        for col in columns {
            if col.len() != dims {
                return Err(CoreError::DimensionMismatch {
                    expected: dims,
                    got: col.len(),
                });
            }
            values.extend_from_slice(col);
        }
        DenseDataset::new(dims, columns.len(), values, source_tag)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.dims..(j + 1) * self.dims]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Minimum over row i (component i across all vectors).
    pub fn row_min(&self, i: usize) -> f64 {
        (0..self.count)
            .map(|j| self.values[j * self.dims + i])
            .fold(f64::INFINITY, f64::min)
    }

    /// The across-dataset mean vector (1/N) * sum_j column_j.
    pub fn mean_column(&self) -> Vec<f64> {
        let mut mean = alloc::vec![0.0; self.dims];
        for j in 0..self.count {
            for (m, v) in mean.iter_mut().zip(self.column(j)) {
                *m += v;
            }
        }
        let n = self.count as f64;
        for m in mean.iter_mut() {
            *m /= n;
        }
        mean
    }

    /// New dataset keeping the listed columns, in the given order.
    pub fn select_columns(&self, ids: &[usize], source_tag: &str) -> Result<Self, CoreError> {
        let mut values = Vec::with_capacity(self.dims * ids.len());
        for &j in ids {
            if j >= self.count {
                return Err(CoreError::BadId {
                    id: j,
                    count: self.count,
                });
            }
            values.extend_from_slice(self.column(j));
        }
        DenseDataset::new(self.dims, ids.len(), values, source_tag)
    }
}

/// Validates a raw column-major matrix into a dataset.
pub fn validate_dataset(
    dims: usize,
    count: usize,
    raw: Vec<f64>,
    source_tag: &str,
) -> Result<DenseDataset, CoreError> {
    DenseDataset::new(dims, count, raw, source_tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn passthrough_2x2() {
        let ds = validate_dataset(2, 2, vec![1.0, 3.0, 2.0, 4.0], "t").unwrap();
        assert_eq!(ds.dims(), 2);
        assert_eq!(ds.count(), 2);
        assert_eq!(ds.column(0), &[1.0, 3.0]);
    }

    #[test]
    fn rejects_nan() {
        let err = validate_dataset(2, 2, vec![1.0, f64::NAN, 2.0, 4.0], "t").unwrap_err();
        assert_eq!(err, CoreError::NonFiniteValue { row: 1, col: 0 });
    }

    #[test]
    fn rejects_empty() {
        assert_eq!(
            validate_dataset(0, 0, vec![], "t").unwrap_err(),
            CoreError::EmptyMatrix
        );
    }

    #[test]
    fn row_min_and_mean() {
        let ds = DenseDataset::from_columns(&[vec![1.0, 3.0], vec![3.0, 5.0]], "t").unwrap();
        assert_eq!(ds.row_min(0), 1.0);
        assert_eq!(ds.mean_column(), vec![2.0, 4.0]);
    }
}
