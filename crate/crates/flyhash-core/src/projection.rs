//! Sampling of sparse binary projection matrices and the expansion
//! y = Mx.
//!
//! Three sampling schemes: independent Bernoulli entries (binomial),
//! exact per-row weights (hypergeometric over rows), and exact per-column
//! weights (hypergeometric over columns). Sampling is row-major for the
//! row-wise schemes, so a matrix with fewer rows and the same seed is a
//! prefix of the larger one.

use alloc::vec::Vec;

use crate::dataset::DenseDataset;
use crate::error::CoreError;
use crate::matrix::{Distribution, Provenance, SparseProjectionMatrix};
use crate::rng::RngStream;
use crate::sparsifier::Embedding;

/// Parameters for drawing one projection matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionSpec {
    pub output_dim: usize,
    pub density: f64,
    pub distribution: Distribution,
    pub seed: u64,
}

impl ProjectionSpec {
    pub fn sample(&self, input_dim: usize) -> Result<SparseProjectionMatrix, CoreError> {
        let mut rng = RngStream::new(self.seed, "matrix");
        match self.distribution {
            Distribution::Binomial => Ok(sample_binomial(
                self.output_dim,
                input_dim,
                self.density,
                &mut rng,
            )),
            Distribution::HypergeoRows => {
                sample_hypergeo_rows(self.output_dim, input_dim, self.density, &mut rng)
            }
            Distribution::HypergeoCols => {
                sample_hypergeo_cols(self.output_dim, input_dim, self.density, &mut rng)
            }
        }
    }
}

/// Round half away from zero, the reading used for the exact weight
/// s = round(p*d).
pub fn round_half_away(v: f64) -> f64 {
    libm::round(v)
}

/// Each of the D*d entries is independently 1 with probability p, drawn
/// in row-major order.
pub fn sample_binomial(
    rows: usize,
    cols: usize,
    p: f64,
    rng: &mut RngStream,
) -> SparseProjectionMatrix {
    let mut row_offsets = Vec::with_capacity(rows + 1);
    let mut col_indices = Vec::new();
    row_offsets.push(0);
    for _ in 0..rows {
        for c in 0..cols {
            if rng.next_f64() < p {
                col_indices.push(c as u32);
            }
        }
        row_offsets.push(col_indices.len());
    }
    SparseProjectionMatrix::new(
        rows,
        cols,
        row_offsets,
        col_indices,
        Some(Provenance {
            distribution: Distribution::Binomial,
            density: p,
            seed: rng.seed(),
        }),
    )
    .expect("row-major sampling yields valid CSR")
}

/// Every row gets exactly s = round(p*d) ones at uniform positions
/// without replacement, independently across rows.
pub fn sample_hypergeo_rows(
    rows: usize,
    cols: usize,
    p: f64,
    rng: &mut RngStream,
) -> Result<SparseProjectionMatrix, CoreError> {
    let s = round_half_away(p * cols as f64) as usize;
    if s < 1 || s > cols {
        return Err(CoreError::InvalidRowWeight { weight: s, cols });
    }
    let mut row_offsets = Vec::with_capacity(rows + 1);
    let mut col_indices = Vec::with_capacity(rows * s);
    row_offsets.push(0);
    for _ in 0..rows {
        let mut picks = rng.sample_without_replacement(cols, s);
        picks.sort_unstable();
        col_indices.extend(picks.iter().map(|&c| c as u32));
        row_offsets.push(col_indices.len());
    }
    SparseProjectionMatrix::new(
        rows,
        cols,
        row_offsets,
        col_indices,
        Some(Provenance {
            distribution: Distribution::HypergeoRows,
            density: p,
            seed: rng.seed(),
        }),
    )
}

/// Every column gets exactly round(p*D) ones at uniform row positions
/// without replacement, independently across columns.
pub fn sample_hypergeo_cols(
    rows: usize,
    cols: usize,
    p: f64,
    rng: &mut RngStream,
) -> Result<SparseProjectionMatrix, CoreError> {
    let s = round_half_away(p * rows as f64) as usize;
    if s < 1 || s > rows {
        return Err(CoreError::InvalidColWeight { weight: s, rows });
    }
    let mut per_row: Vec<Vec<u32>> = alloc::vec![Vec::new(); rows];
    for c in 0..cols {
        for r in rng.sample_without_replacement(rows, s) {
            per_row[r].push(c as u32);
        }
    }
    let mut row_offsets = Vec::with_capacity(rows + 1);
    let mut col_indices = Vec::with_capacity(cols * s);
    row_offsets.push(0);
    for row in &mut per_row {
        row.sort_unstable();
        col_indices.extend_from_slice(row);
        row_offsets.push(col_indices.len());
    }
    SparseProjectionMatrix::new(
        rows,
        cols,
        row_offsets,
        col_indices,
        Some(Provenance {
            distribution: Distribution::HypergeoCols,
            density: p,
            seed: rng.seed(),
        }),
    )
}

/// The expansion y = Mx: component i sums the x entries selected by row i.
pub fn project(m: &SparseProjectionMatrix, x: &[f64]) -> Result<Embedding, CoreError> {
    if x.len() != m.cols() {
        return Err(CoreError::DimensionMismatch {
            expected: m.cols(),
            got: x.len(),
        });
    }
    let mut values = Vec::with_capacity(m.rows());
    for r in 0..m.rows() {
        values.push(m.row(r).iter().map(|&c| x[c as usize]).sum());
    }
    Embedding::dense_activation(values)
}

/// Projects every dataset column, order preserved.
pub fn project_dataset(
    m: &SparseProjectionMatrix,
    x: &DenseDataset,
) -> Result<Vec<Embedding>, CoreError> {
    (0..x.count()).map(|j| project(m, x.column(j))).collect()
}
