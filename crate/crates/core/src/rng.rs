//! Seeded, splittable random streams.
//!
//! A stream is identified by `(seed, stream_id)`. The generator behind it is
//! ChaCha8 keyed by `seed` with `stream_id` selecting the ChaCha stream, so two
//! ids never share keystream. Child streams are derived by hashing the parent id
//! with a tag, which lets replication `i` and fold `j` get `derive(i).derive(j)`
//! independently of the order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Child stream keyed by `tag`.
    pub fn derive(&self, tag: u64) -> Self {
        let h = mix64(self.stream_id ^ mix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        Self { seed: self.seed, stream_id: h }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
