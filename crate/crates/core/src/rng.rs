//! Deterministic random streams.
//!
//! Every Monte-Carlo loop derives one stream per trial from a root seed, so a
//! run is reproducible regardless of how the trials are scheduled across
//! threads. Streams are ChaCha8 generators keyed by the root seed and indexed
//! by the ChaCha stream counter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator type used throughout the crate.
pub type Stream = ChaCha8Rng;

/// A root seed from which independent per-task streams are split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    root: u64,
}

impl SeedTree {
    pub fn new(root: u64) -> Self {
        Self { root }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// Stream number `index` under this root.
    pub fn stream(&self, index: u64) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.root);
        rng.set_stream(index);
        rng
    }

    /// A child tree whose streams do not overlap with this tree's streams.
    pub fn child(&self, label: u64) -> SeedTree {
        SeedTree {
            root: splitmix64(self.root ^ splitmix64(label.wrapping_add(0x9e37_79b9_7f4a_7c15))),
        }
    }
}

/// One step of the SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standalone stream seeded directly from a `u64`.
pub fn stream_from_seed(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}
