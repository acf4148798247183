//! Seed plumbing: every random draw in the toolkit is determined by an
//! `RngSeed`, and concurrent evaluations get distinct streams derived
//! deterministically from a root seed.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// A (seed, stream) pair that fully determines a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Root seed for a run: stream 0.
    pub fn root(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    /// Deterministic child stream for the `index`-th parallel evaluation.
    ///
    /// Uses splitmix64 over (stream_id, index) so children of different
    /// parents never collide in practice.
    pub fn child(&self, index: u64) -> Self {
        let mixed = splitmix64(splitmix64(self.stream_id.wrapping_add(0x9e37_79b9_7f4a_7c15)) ^ index);
        Self::new(self.seed, mixed)
    }

    /// Instantiate the ChaCha stream this seed names.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
