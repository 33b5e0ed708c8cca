//! MAP@K evaluation: ground-truth rankings on the (preprocessed) input
//! vectors, predicted rankings on the embeddings, Average Precision at K
//! per query, and the mean over queries and matrix realizations.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::DenseDataset;
use crate::error::CoreError;
use crate::pairwise_mean;
use crate::rng::RngStream;
use crate::similarity::{rank_neighbors, Measure};
use crate::sparsifier::Embedding;

/// Evaluation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSpec {
    /// Ranking truncation depth.
    pub k_at: usize,
    /// Number of sampled queries per realization.
    pub num_queries: usize,
    /// Number of matrix realizations.
    pub num_realizations: usize,
    pub gt_measure: Measure,
    pub emb_measure: Measure,
    pub query_seed: u64,
}

impl EvalSpec {
    /// K=200, Q=1000, R=10.
    pub fn defaults(gt_measure: Measure, emb_measure: Measure, query_seed: u64) -> Self {
        EvalSpec {
            k_at: 200,
            num_queries: 1000,
            num_realizations: 10,
            gt_measure,
            emb_measure,
            query_seed,
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), CoreError> {
        if self.k_at == 0 || self.k_at > n.saturating_sub(1) {
            return Err(CoreError::BadK {
                k: self.k_at,
                dim: n.saturating_sub(1),
            });
        }
        if self.num_queries == 0 || self.num_queries > n {
            return Err(CoreError::BadK {
                k: self.num_queries,
                dim: n,
            });
        }
        Ok(())
    }
}

/// Per-realization MAP values and their mean, plus the config fingerprint
/// that regenerates them. `wall_ms` is filled in by the caller that owns
/// a clock.
#[derive(Debug, Clone, PartialEq)]
pub struct MapReport {
    pub per_realization: Vec<f64>,
    pub mean_map: f64,
    pub fingerprint: String,
    pub wall_ms: u64,
}

impl MapReport {
    pub fn from_values(per_realization: Vec<f64>, fingerprint: String) -> Self {
        let mean_map = pairwise_mean(&per_realization);
        MapReport {
            per_realization,
            mean_map,
            fingerprint,
            wall_ms: 0,
        }
    }
}

/// Top-K neighbor ids per query, ranked on the input vectors.
pub fn ground_truth_topk(
    x: &DenseDataset,
    measure: Measure,
    k_at: usize,
    query_ids: &[usize],
) -> Result<Vec<(usize, Vec<usize>)>, CoreError> {
    if k_at > x.count().saturating_sub(1) {
        return Err(CoreError::BadK {
            k: k_at,
            dim: x.count().saturating_sub(1),
        });
    }
    let vectors = dataset_as_embeddings(x)?;
    query_ids
        .iter()
        .map(|&q| {
            let mut ranked = rank_neighbors(q, &vectors, measure)?;
            ranked.truncate(k_at);
            Ok((q, ranked))
        })
        .collect()
}

pub fn dataset_as_embeddings(x: &DenseDataset) -> Result<Vec<Embedding>, CoreError> {
    (0..x.count())
        .map(|j| Embedding::dense_activation(x.column(j).to_vec()))
        .collect()
}

/// AP@K with normalization by K: since the truth set is the top-K list,
/// exactly K items are relevant and the value is bounded by 1.
pub fn average_precision_at_k(
    truth: &[usize],
    predicted: &[usize],
    k_at: usize,
) -> Result<f64, CoreError> {
    if truth.len() != k_at || k_at == 0 {
        return Err(CoreError::BadK {
            k: k_at,
            dim: truth.len(),
        });
    }
    let mut truth_sorted = truth.to_vec();
    truth_sorted.sort_unstable();
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, p) in predicted.iter().take(k_at).enumerate() {
        if truth_sorted.binary_search(p).is_ok() {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Ok(sum / k_at as f64)
}

/// Q query positions sampled uniformly without replacement; the stream
/// label carries the realization index so realizations draw independent
/// query sets.
pub fn sample_query_ids(
    n: usize,
    num_queries: usize,
    query_seed: u64,
    realization: usize,
) -> Vec<usize> {
    let label = alloc::format!("queries/{realization}");
    let mut rng = RngStream::new(query_seed, &label);
    rng.sample_without_replacement(n, num_queries)
}

/// Mean AP@K against precomputed ground-truth top-K lists.
pub fn map_from_truth(
    truth: &[(usize, Vec<usize>)],
    embeddings: &[Embedding],
    emb_measure: Measure,
    k_at: usize,
) -> Result<f64, CoreError> {
    let mut aps = Vec::with_capacity(truth.len());
    for (q, gt) in truth {
        let mut predicted = rank_neighbors(*q, embeddings, emb_measure)?;
        predicted.truncate(k_at);
        aps.push(average_precision_at_k(gt, &predicted, k_at)?);
    }
    Ok(pairwise_mean(&aps))
}

/// One realization of the MAP estimate: seeded query sample, ground truth
/// on the inputs, predicted rankings on the embeddings, mean AP@K.
pub fn map_at_k(
    x_pre: &DenseDataset,
    embeddings: &[Embedding],
    spec: &EvalSpec,
    realization: usize,
) -> Result<f64, CoreError> {
    let n = x_pre.count();
    if embeddings.len() != n {
        return Err(CoreError::DimensionMismatch {
            expected: n,
            got: embeddings.len(),
        });
    }
    spec.validate(n)?;
    let query_ids = sample_query_ids(n, spec.num_queries, spec.query_seed, realization);
    let truth = ground_truth_topk(x_pre, spec.gt_measure, spec.k_at, &query_ids)?;
    map_from_truth(&truth, embeddings, spec.emb_measure, spec.k_at)
}
