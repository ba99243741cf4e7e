//! Seeded, order-independent random streams.
//!
//! Every random draw in the crate comes from a stream keyed by
//! `(seed, label, index)`. Identical keys give identical draws no matter
//! which worker asks first, so parallel generation and parallel Monte
//! Carlo trials reproduce bit-for-bit.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Root seed plus the `(seed, label, index)` sub-stream derivation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
}

const DOMAIN_TAG: u64 = 0x9e37_79b9_7f4a_7c15;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        RngSpec { seed }
    }

    /// The stream for `(label, index)`: a ChaCha8 generator keyed by the
    /// packed `(seed, fnv(label), index, tag)` tuple.
    pub fn stream(&self, label: &str, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&fnv1a64(label.as_bytes()).to_le_bytes());
        key[16..24].copy_from_slice(&index.to_le_bytes());
        key[24..32].copy_from_slice(&DOMAIN_TAG.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn identical_keys_give_identical_draws() {
        let spec = RngSpec::new(7);
        let a: Vec<u64> = spec.stream("col", 3).random_iter().take(8).collect();
        let b: Vec<u64> = spec.stream("col", 3).random_iter().take(8).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_labels_and_indices_give_distinct_streams() {
        let spec = RngSpec::new(7);
        let a: u64 = spec.stream("col", 0).random();
        let b: u64 = spec.stream("col", 1).random();
        let c: u64 = spec.stream("row", 0).random();
        let d: u64 = RngSpec::new(8).stream("col", 0).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
