//! Distance measures and exhaustive neighbor ranking.
//!
//! Rankings are computed from monotone sort keys (squared distance, or
//! negated cosine for the angular measure) with ties broken by ascending
//! id, so every permutation is total and reproducible. The reported
//! distance values go through the actual sqrt/arccos.

use alloc::vec::Vec;

use crate::error::CoreError;
use crate::sparsifier::Embedding;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Euclidean,
    Angular,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Euclidean => "euclidean",
            Measure::Angular => "angular",
        }
    }
}

/// Count of shared indices between two sorted lists.
fn overlap(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// (dot, |a|^2, |b|^2) for two sorted (index, value) lists.
fn sparse_products(a: &[(usize, f64)], b: &[(usize, f64)]) -> (f64, f64, f64) {
    let na: f64 = a.iter().map(|&(_, v)| v * v).sum();
    let nb: f64 = b.iter().map(|&(_, v)| v * v).sum();
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                dot += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    (dot, na, nb)
}

/// (dot, |a|^2, |b|^2) via the cheapest path for the variant pair.
fn products(a: &Embedding, b: &Embedding) -> Result<(f64, f64, f64), CoreError> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    match (a, b) {
        (Embedding::DenseActivation { values: va }, Embedding::DenseActivation { values: vb }) => {
            let dot = va.iter().zip(vb).map(|(x, y)| x * y).sum();
            let na = va.iter().map(|x| x * x).sum();
            let nb = vb.iter().map(|x| x * x).sum();
            Ok((dot, na, nb))
        }
        (Embedding::RealSparse { entries: ea, .. }, Embedding::RealSparse { entries: eb, .. }) => {
            Ok(sparse_products(ea, eb))
        }
        _ => match (a.support(), b.support()) {
            (Some(sa), Some(sb)) => Ok((
                overlap(&sa, &sb) as f64,
                sa.len() as f64,
                sb.len() as f64,
            )),
            _ => {
                // mixed variants fall back to densified vectors
                let da = a.to_dense();
                let db = b.to_dense();
                let dot = da.iter().zip(&db).map(|(x, y)| x * y).sum();
                let na = da.iter().map(|x| x * x).sum();
                let nb = db.iter().map(|x| x * x).sum();
                Ok((dot, na, nb))
            }
        },
    }
}

pub fn euclidean_dist(a: &Embedding, b: &Embedding) -> Result<f64, CoreError> {
    let (dot, na, nb) = products(a, b)?;
    Ok(libm::sqrt((na + nb - 2.0 * dot).max(0.0)))
}

/// Angle in [0, pi]; cosine is clamped to [-1, 1] before arccos.
pub fn angular_dist(a: &Embedding, b: &Embedding) -> Result<f64, CoreError> {
    let (dot, na, nb) = products(a, b)?;
    if na == 0.0 {
        return Err(CoreError::ZeroNormVector { index: 0 });
    }
    if nb == 0.0 {
        return Err(CoreError::ZeroNormVector { index: 1 });
    }
    let cos = (dot / libm::sqrt(na * nb)).clamp(-1.0, 1.0);
    Ok(libm::acos(cos))
}

/// Ranking key: any value whose ascending order equals ascending distance
/// under `measure`. Squared Euclidean distance, or negated cosine.
pub fn ranking_key(a: &Embedding, b: &Embedding, measure: Measure) -> Result<f64, CoreError> {
    let (dot, na, nb) = products(a, b)?;
    match measure {
        Measure::Euclidean => Ok(na + nb - 2.0 * dot),
        Measure::Angular => {
            if na == 0.0 || nb == 0.0 {
                return Err(CoreError::ZeroNormVector {
                    index: usize::from(na != 0.0),
                });
            }
            Ok(-(dot / libm::sqrt(na * nb)).clamp(-1.0, 1.0))
        }
    }
}

/// All ids except the query, sorted ascending by distance under
/// `measure`, ties broken by ascending id.
pub fn rank_neighbors(
    query_id: usize,
    vectors: &[Embedding],
    measure: Measure,
) -> Result<Vec<usize>, CoreError> {
    if query_id >= vectors.len() {
        return Err(CoreError::BadId {
            id: query_id,
            count: vectors.len(),
        });
    }
    let query = &vectors[query_id];
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(vectors.len() - 1);
    for (id, v) in vectors.iter().enumerate() {
        if id == query_id {
            continue;
        }
        keyed.push((ranking_key(query, v, measure)?, id));
    }
    keyed.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("ranking keys are finite")
            .then(a.1.cmp(&b.1))
    });
    Ok(keyed.into_iter().map(|(_, id)| id).collect())
}
