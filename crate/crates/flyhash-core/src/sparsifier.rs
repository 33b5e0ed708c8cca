//! Competitive nonlinearities turning dense activations into sparse
//! embeddings, plus the bit-cost and entropy accounting that motivates
//! the block-winner variant.
//!
//! Tie-breaking is lowest-index-wins everywhere, which makes every output
//! reproducible across platforms.

use alloc::vec::Vec;

use crate::error::CoreError;

const LN_2: f64 = core::f64::consts::LN_2;

/// One embedding in any of the supported representations.
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    /// The raw expansion y = Mx.
    DenseActivation { values: Vec<f64> },
    /// kWTA output: the k largest activations at their indices.
    RealSparse { dim: usize, entries: Vec<(usize, f64)> },
    /// Binary kWTA output: the support of the k largest activations.
    BinarySparse { dim: usize, indices: Vec<usize> },
    /// Block code: one winner offset per contiguous block.
    BlockCode {
        block_sizes: Vec<usize>,
        winners: Vec<usize>,
    },
}

impl Embedding {
    pub fn dense_activation(values: Vec<f64>) -> Result<Self, CoreError> {
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::NonFiniteValue { row: i, col: 0 });
            }
        }
        Ok(Embedding::DenseActivation { values })
    }

    pub fn real_sparse(dim: usize, entries: Vec<(usize, f64)>) -> Result<Self, CoreError> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(CoreError::BadSnapshot {
                    reason: "sparse indices not strictly increasing",
                });
            }
        }
        if let Some(&(last, _)) = entries.last() {
            if last >= dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    got: last,
                });
            }
        }
        Ok(Embedding::RealSparse { dim, entries })
    }

    pub fn binary_sparse(dim: usize, indices: Vec<usize>) -> Result<Self, CoreError> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(CoreError::BadSnapshot {
                    reason: "sparse indices not strictly increasing",
                });
            }
        }
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(CoreError::DimensionMismatch {
                    expected: dim,
                    got: last,
                });
            }
        }
        Ok(Embedding::BinarySparse { dim, indices })
    }

    pub fn block_code(block_sizes: Vec<usize>, winners: Vec<usize>) -> Result<Self, CoreError> {
        if block_sizes.len() != winners.len() || block_sizes.is_empty() {
            return Err(CoreError::BadK {
                k: winners.len(),
                dim: block_sizes.len(),
            });
        }
        for (b, (&size, &w)) in block_sizes.iter().zip(&winners).enumerate() {
            if size == 0 || w >= size {
                return Err(CoreError::BadBlockIndex {
                    index: b,
                    blocks: block_sizes.len(),
                });
            }
        }
        Ok(Embedding::BlockCode {
            block_sizes,
            winners,
        })
    }

    /// Ambient dimensionality D of the embedding.
    pub fn dim(&self) -> usize {
        match self {
            Embedding::DenseActivation { values } => values.len(),
            Embedding::RealSparse { dim, .. } | Embedding::BinarySparse { dim, .. } => *dim,
            Embedding::BlockCode { block_sizes, .. } => block_sizes.iter().sum(),
        }
    }

    pub fn dense_values(&self) -> Option<&[f64]> {
        match self {
            Embedding::DenseActivation { values } => Some(values),
            _ => None,
        }
    }

    /// Sorted global indices of the stored components (sparse variants).
    pub fn support(&self) -> Option<Vec<usize>> {
        match self {
            Embedding::RealSparse { entries, .. } => {
                Some(entries.iter().map(|&(i, _)| i).collect())
            }
            Embedding::BinarySparse { indices, .. } => Some(indices.clone()),
            Embedding::BlockCode {
                block_sizes,
                winners,
            } => {
                let mut out = Vec::with_capacity(winners.len());
                let mut base = 0;
                for (&size, &w) in block_sizes.iter().zip(winners) {
                    out.push(base + w);
                    base += size;
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Materializes to a dense vector; binary variants become 0/1.
    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Embedding::DenseActivation { values } => values.clone(),
            Embedding::RealSparse { dim, entries } => {
                let mut out = alloc::vec![0.0; *dim];
                for &(i, v) in entries {
                    out[i] = v;
                }
                out
            }
            _ => {
                let mut out = alloc::vec![0.0; self.dim()];
                for i in self.support().expect("binary variant") {
                    out[i] = 1.0;
                }
                out
            }
        }
    }
}

/// Which nonlinearity to apply to a dense activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparsifierSpec {
    /// Keep the k largest values.
    KwtaReal { k: usize },
    /// Keep the support of the k largest values as a 0/1 vector.
    KwtaBinary { k: usize },
    /// kWTA rescaled to unit Euclidean norm.
    KwtaRealL2 { k: usize },
    /// One winner per contiguous block, k blocks.
    BlockBinary { k: usize },
}

impl SparsifierSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SparsifierSpec::KwtaReal { .. } => "kwta_real",
            SparsifierSpec::KwtaBinary { .. } => "kwta_binary",
            SparsifierSpec::KwtaRealL2 { .. } => "kwta_real_l2",
            SparsifierSpec::BlockBinary { .. } => "block_binary",
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            SparsifierSpec::KwtaReal { k }
            | SparsifierSpec::KwtaBinary { k }
            | SparsifierSpec::KwtaRealL2 { k }
            | SparsifierSpec::BlockBinary { k } => k,
        }
    }

    pub fn apply(&self, y: &Embedding) -> Result<Embedding, CoreError> {
        let values = y.dense_values().ok_or(CoreError::BadSnapshot {
            reason: "sparsifier input must be a dense activation",
        })?;
        match *self {
            SparsifierSpec::KwtaReal { k } => kwta(values, k),
            SparsifierSpec::KwtaBinary { k } => kwta_binary(values, k),
            SparsifierSpec::KwtaRealL2 { k } => kwta_l2(values, k),
            SparsifierSpec::BlockBinary { k } => block_winners(values, k),
        }
    }
}

/// Indices of the k largest values, ties broken toward lower index,
/// returned sorted ascending.
fn top_k_indices(y: &[f64], k: usize) -> Result<Vec<usize>, CoreError> {
    if k == 0 || k > y.len() {
        return Err(CoreError::BadK { k, dim: y.len() });
    }
    let mut order: Vec<usize> = (0..y.len()).collect();
    // descending by value, ascending by index on ties; exact selection
    order.sort_unstable_by(|&a, &b| {
        y[b].partial_cmp(&y[a])
            .expect("activations are finite")
            .then(a.cmp(&b))
    });
    let mut winners = order[..k].to_vec();
    winners.sort_unstable();
    Ok(winners)
}

/// kWTA: keep the k largest activations, zero the rest.
pub fn kwta(y: &[f64], k: usize) -> Result<Embedding, CoreError> {
    let winners = top_k_indices(y, k)?;
    let entries = winners.into_iter().map(|i| (i, y[i])).collect();
    Embedding::real_sparse(y.len(), entries)
}

/// Binary kWTA: the support of the k largest activations; always exactly
/// k ones, so the implied vector has L2 norm sqrt(k).
pub fn kwta_binary(y: &[f64], k: usize) -> Result<Embedding, CoreError> {
    let winners = top_k_indices(y, k)?;
    Embedding::binary_sparse(y.len(), winners)
}

/// kWTA followed by Euclidean normalization of the kept values.
pub fn kwta_l2(y: &[f64], k: usize) -> Result<Embedding, CoreError> {
    let e = kwta(y, k)?;
    let Embedding::RealSparse { dim, entries } = e else {
        unreachable!()
    };
    let norm = libm::sqrt(entries.iter().map(|&(_, v)| v * v).sum::<f64>());
    if norm == 0.0 {
        return Err(CoreError::ZeroNormVector { index: 0 });
    }
    let entries = entries.into_iter().map(|(i, v)| (i, v / norm)).collect();
    Embedding::real_sparse(dim, entries)
}

/// k contiguous blocks covering D indices. When k divides D all blocks
/// have size D/k; otherwise the first D mod k blocks take the extra
/// element.
pub fn block_partition(dim: usize, k: usize) -> Result<Vec<usize>, CoreError> {
    if k == 0 || k > dim {
        return Err(CoreError::BadK { k, dim });
    }
    let base = dim / k;
    let extra = dim % k;
    Ok((0..k)
        .map(|b| if b < extra { base + 1 } else { base })
        .collect())
}

/// Block code: for each contiguous block, the offset of the largest
/// activation (ties toward lower offset).
pub fn block_winners(y: &[f64], k: usize) -> Result<Embedding, CoreError> {
    let sizes = block_partition(y.len(), k)?;
    let mut winners = Vec::with_capacity(k);
    let mut base = 0;
    for &size in &sizes {
        let block = &y[base..base + size];
        let mut best = 0;
        for (i, &v) in block.iter().enumerate().skip(1) {
            if v > block[best] {
                best = i;
            }
        }
        winners.push(best);
        base += size;
    }
    Embedding::block_code(sizes, winners)
}

/// Bits to store a kWTA support: k positions of log2(D) bits each.
pub fn storage_bits_kwta(k: usize, dim: usize) -> Result<f64, CoreError> {
    if k == 0 || k > dim {
        return Err(CoreError::BadK { k, dim });
    }
    Ok(k as f64 * libm::log2(dim as f64))
}

/// Bits to store a block code: k within-block positions of log2(D/k)
/// bits each.
pub fn storage_bits_block(k: usize, dim: usize) -> Result<f64, CoreError> {
    if k == 0 || k > dim {
        return Err(CoreError::BadK { k, dim });
    }
    Ok(k as f64 * libm::log2(dim as f64 / k as f64))
}

/// log2 C(D, k): entropy of an unconstrained k-sparse binary code.
pub fn entropy_kwta(dim: usize, k: usize) -> Result<f64, CoreError> {
    if k == 0 || k > dim {
        return Err(CoreError::BadK { k, dim });
    }
    let lg = |n: usize| libm::lgamma(n as f64 + 1.0);
    Ok((lg(dim) - lg(k) - lg(dim - k)) / LN_2)
}

/// k * log2(D/k): entropy of a block code, always <= [`entropy_kwta`].
pub fn entropy_block(dim: usize, k: usize) -> Result<f64, CoreError> {
    storage_bits_block(k, dim)
}

/// Result of solving k' * log2(D/k') = k * log2(D) on the increasing
/// branch (k' <= floor(D/e)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchingBlocks {
    pub k_prime: usize,
    /// True when the target bit budget exceeds the branch maximum and
    /// k' was clamped to floor(D/e).
    pub saturated: bool,
}

/// Largest k' on the increasing branch whose block-code bit cost does
/// not exceed the kWTA bit cost k * log2(D). Total: saturates at
/// floor(D/e) when the equation has no solution.
pub fn matching_blocks(k: usize, dim: usize) -> Result<MatchingBlocks, CoreError> {
    if k == 0 || k > dim {
        return Err(CoreError::BadK { k, dim });
    }
    let target = k as f64 * libm::log2(dim as f64);
    let branch_top = ((dim as f64) / core::f64::consts::E) as usize;
    let branch_top = branch_top.max(1);
    let cost = |kp: usize| kp as f64 * libm::log2(dim as f64 / kp as f64);
    if cost(branch_top) < target {
        return Ok(MatchingBlocks {
            k_prime: branch_top,
            saturated: true,
        });
    }
    // largest k' in [1, branch_top] with cost(k') <= target; cost is
    // increasing on this range, so binary search
    let (mut lo, mut hi) = (1usize, branch_top);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if cost(mid) <= target {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(MatchingBlocks {
        k_prime: lo,
        saturated: false,
    })
}

/// Keeps the first `prefix` blocks of a block code or of a binary-sparse
/// embedding with an imposed partition. The truncated dimensionality is
/// the sum of the kept block sizes; a truncated binary embedding may
/// hold fewer than `prefix` ones.
pub fn truncate_blocks(
    e: &Embedding,
    partition: Option<&[usize]>,
    prefix: usize,
) -> Result<Embedding, CoreError> {
    match e {
        Embedding::BlockCode {
            block_sizes,
            winners,
        } => {
            if prefix == 0 || prefix > winners.len() {
                return Err(CoreError::BadBlockIndex {
                    index: prefix,
                    blocks: winners.len(),
                });
            }
            Embedding::block_code(
                block_sizes[..prefix].to_vec(),
                winners[..prefix].to_vec(),
            )
        }
        Embedding::BinarySparse { dim, indices } => {
            let partition = partition.ok_or(CoreError::BadSnapshot {
                reason: "binary truncation needs a block partition",
            })?;
            if prefix == 0 || prefix > partition.len() {
                return Err(CoreError::BadBlockIndex {
                    index: prefix,
                    blocks: partition.len(),
                });
            }
            if partition.iter().sum::<usize>() != *dim {
                return Err(CoreError::DimensionMismatch {
                    expected: *dim,
                    got: partition.iter().sum(),
                });
            }
            let kept_dim: usize = partition[..prefix].iter().sum();
            let kept = indices.iter().copied().take_while(|&i| i < kept_dim).collect();
            Embedding::binary_sparse(kept_dim, kept)
        }
        _ => Err(CoreError::BadSnapshot {
            reason: "truncation applies to block or binary embeddings",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn kwta_example() {
        let e = kwta(&[3.0, 1.0, 4.0, 1.0, 5.0], 2).unwrap();
        assert_eq!(
            e,
            Embedding::real_sparse(5, vec![(2, 4.0), (4, 5.0)]).unwrap()
        );
    }

    #[test]
    fn kwta_k_equals_dim_keeps_all() {
        let y = [2.0, -1.0, 0.5];
        let e = kwta(&y, 3).unwrap();
        assert_eq!(e.to_dense(), vec![2.0, -1.0, 0.5]);
    }

    #[test]
    fn kwta_ties_go_to_lower_index() {
        let e = kwta(&[1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(e.support().unwrap(), vec![0, 1]);
    }

    #[test]
    fn kwta_binary_example() {
        let e = kwta_binary(&[3.0, 1.0, 4.0, 1.0, 5.0], 2).unwrap();
        assert_eq!(e, Embedding::binary_sparse(5, vec![2, 4]).unwrap());
    }

    #[test]
    fn kwta_binary_full_support() {
        let e = kwta_binary(&[0.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(e.support().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn kwta_l2_example() {
        let e = kwta_l2(&[3.0, 1.0, 4.0, 1.0, 5.0], 2).unwrap();
        let n = libm::sqrt(41.0);
        let Embedding::RealSparse { entries, .. } = e else {
            panic!()
        };
        assert_eq!(entries, vec![(2, 4.0 / n), (4, 5.0 / n)]);
    }

    #[test]
    fn kwta_l2_single_winner_is_unit() {
        let e = kwta_l2(&[0.0, 7.0, 0.0], 1).unwrap();
        let Embedding::RealSparse { entries, .. } = e else {
            panic!()
        };
        assert_eq!(entries, vec![(1, 1.0)]);
    }

    #[test]
    fn kwta_l2_zero_input_fails() {
        assert_eq!(
            kwta_l2(&[0.0, 0.0, 0.0], 2).unwrap_err(),
            CoreError::ZeroNormVector { index: 0 }
        );
    }

    #[test]
    fn block_partition_even_and_uneven() {
        assert_eq!(block_partition(6, 2).unwrap(), vec![3, 3]);
        assert_eq!(block_partition(7, 2).unwrap(), vec![4, 3]);
        assert_eq!(block_partition(3, 3).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn block_winners_example() {
        let e = block_winners(&[3.0, 1.0, 4.0, 1.0, 5.0, 9.0], 2).unwrap();
        assert_eq!(e.support().unwrap(), vec![2, 5]);
    }

    #[test]
    fn block_winners_constant_input_picks_offset_zero() {
        let e = block_winners(&[1.0; 6], 3).unwrap();
        let Embedding::BlockCode { winners, .. } = e else {
            panic!()
        };
        assert_eq!(winners, vec![0, 0, 0]);
    }

    #[test]
    fn block_winners_k1_is_argmax() {
        let e = block_winners(&[1.0, 9.0, 3.0], 1).unwrap();
        assert_eq!(e.support().unwrap(), vec![1]);
    }

    #[test]
    fn storage_bits() {
        assert_eq!(storage_bits_kwta(4, 64).unwrap(), 24.0);
        assert_eq!(storage_bits_kwta(1, 2).unwrap(), 1.0);
        assert_eq!(storage_bits_block(4, 64).unwrap(), 16.0);
        assert_eq!(storage_bits_block(16, 16).unwrap(), 0.0);
        assert_eq!(storage_bits_block(2, 16).unwrap(), 6.0);
    }

    #[test]
    fn entropy_small_cases() {
        // log2 C(6,2) = log2 15 vs 2*log2 3
        assert!((entropy_kwta(6, 2).unwrap() - libm::log2(15.0)).abs() < 1e-12);
        assert!((entropy_block(6, 2).unwrap() - 2.0 * libm::log2(3.0)).abs() < 1e-12);
        // k=1: both log2(D)
        assert!((entropy_kwta(9, 1).unwrap() - libm::log2(9.0)).abs() < 1e-12);
        assert_eq!(entropy_block(9, 1).unwrap(), libm::log2(9.0));
    }

    #[test]
    fn matching_blocks_exact_roots() {
        assert_eq!(
            matching_blocks(4, 64).unwrap(),
            MatchingBlocks {
                k_prime: 8,
                saturated: false
            }
        );
        assert_eq!(
            matching_blocks(2, 16).unwrap(),
            MatchingBlocks {
                k_prime: 4,
                saturated: false
            }
        );
    }

    #[test]
    fn matching_blocks_scan_case() {
        assert_eq!(
            matching_blocks(32, 640).unwrap(),
            MatchingBlocks {
                k_prime: 129,
                saturated: false
            }
        );
    }

    #[test]
    fn matching_blocks_saturates() {
        let m = matching_blocks(256, 5120).unwrap();
        assert!(m.saturated);
        assert_eq!(m.k_prime, 1883); // floor(5120/e)
    }

    #[test]
    fn truncate_block_code() {
        let e = block_winners(&[3.0, 1.0, 4.0, 1.0, 5.0, 9.0], 2).unwrap();
        let t = truncate_blocks(&e, None, 1).unwrap();
        assert_eq!(t.support().unwrap(), vec![2]);
        assert_eq!(t.dim(), 3);
        let full = truncate_blocks(&e, None, 2).unwrap();
        assert_eq!(full, e);
    }

    #[test]
    fn truncate_binary_sparse() {
        let e = Embedding::binary_sparse(6, vec![2, 4]).unwrap();
        let t = truncate_blocks(&e, Some(&[3, 3]), 1).unwrap();
        assert_eq!(t, Embedding::binary_sparse(3, vec![2]).unwrap());
    }
}
