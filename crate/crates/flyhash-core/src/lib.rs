//! Similarity-preserving sparse randomized embeddings.
//!
//! Implements the expand & sparsify pipeline: a dense input vector is
//! expanded through a sparse binary random projection matrix and then
//! sparsified with a competitive nonlinearity (kWTA, binary kWTA, or a
//! block-winner code). The crate also carries the retrieval-quality
//! machinery built around it: dataset preprocessing, distance measures,
//! exhaustive neighbor ranking, and MAP@K evaluation over seeded matrix
//! realizations.
//!
//! The crate is `no_std` (with `alloc`) so the numeric core can be reused
//! from constrained targets; all file IO lives in the companion
//! `flyhash-bench` crate.

#![no_std]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod matrix;
pub mod pipeline;
pub mod preprocess;
pub mod projection;
pub mod rng;
pub mod similarity;
pub mod sparsifier;

pub use dataset::DenseDataset;
pub use error::CoreError;
pub use evaluation::{EvalSpec, MapReport};
pub use matrix::{Distribution, SparseProjectionMatrix};
pub use pipeline::PipelineConfig;
pub use preprocess::PreprocessSpec;
pub use projection::ProjectionSpec;
pub use rng::RngStream;
pub use similarity::Measure;
pub use sparsifier::{Embedding, SparsifierSpec};

/// Deterministic pairwise summation; the reduction tree depends only on
/// the slice length, so the result is reproducible regardless of how the
/// values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Mean via [`pairwise_sum`]; 0.0 on an empty slice.
pub fn pairwise_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        pairwise_sum(values) / values.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_sequential_on_integers() {
        let v: alloc::vec::Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
    }

    #[test]
    fn pairwise_mean_empty() {
        assert_eq!(pairwise_mean(&[]), 0.0);
    }
}
