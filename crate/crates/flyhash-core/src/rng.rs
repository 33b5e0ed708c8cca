//! Deterministic, labeled random streams.
//!
//! Every random draw in the crate goes through [`RngStream`]: a ChaCha12
//! generator keyed from a 64-bit seed and a text label via a SplitMix64
//! absorption chain. The algorithm identity is fixed, so identical
//! (seed, label) pairs reproduce identical draw sequences on any platform.

use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A named deterministic random stream.
///
/// Distinct labels under the same seed give independent streams, which is
/// how matrix sampling and query sampling stay decoupled.
pub struct RngStream {
    seed: u64,
    label: String,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, label: &str) -> Self {
        let mut state = seed;
        for &b in label.as_bytes() {
            state = splitmix64(&mut state) ^ u64::from(b);
        }
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        RngStream {
            seed,
            label: String::from(label),
            rng: ChaCha12Rng::from_seed(key),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n) by bitmask rejection; unbiased.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below(0)");
        let mask = u64::MAX >> (n - 1).leading_zeros().min(63);
        loop {
            let v = self.next_u64() & mask;
            if v < n {
                return v;
            }
        }
    }

    /// `count` distinct values from [0, n), in draw order. Partial
    /// Fisher-Yates over a virtual array tracked with a map, so extra
    /// space is O(count).
    pub fn sample_without_replacement(&mut self, n: usize, count: usize) -> Vec<usize> {
        assert!(count <= n, "cannot sample {count} from {n}");
        let mut swapped: alloc::collections::BTreeMap<usize, usize> =
            alloc::collections::BTreeMap::new();
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let j = i + self.next_below((n - i) as u64) as usize;
            let vj = *swapped.get(&j).unwrap_or(&j);
            let vi = *swapped.get(&i).unwrap_or(&i);
            swapped.insert(j, vi);
            out.push(vj);
        }
        out
    }
}
