//! Per-trajectory random streams.
//!
//! Stream derivation rule: trajectory `index` of an ensemble with master seed
//! `seed` draws from ChaCha8 keyed by `seed_from_u64(seed)` on stream number
//! `index`. Streams are independent of how trajectories are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamId {
    pub seed: u64,
    pub index: u64,
}

pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

impl StreamId {
    pub fn rng(&self) -> StreamRng {
        stream(self.seed, self.index)
    }
}

/// Derives an independent master seed for a sub-ensemble (e.g. the second
/// cloud of a comparison) without overlapping the parent's streams.
pub fn subseed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
