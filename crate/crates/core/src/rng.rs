//! Seeded, splittable random streams.
//!
//! A stream is a ChaCha8 generator keyed by `seed` with the ChaCha stream
//! id set to `stream_index`. Replicate `j` of an experiment always uses
//! stream `j`, so results do not depend on how replicates are scheduled.
//! Product components get disjoint blocks of the same stream via the
//! 68-bit word position.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

const SUBSTREAM_SHIFT: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        RngStream { seed, stream_index }
    }

    pub fn rng(&self) -> StreamRng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_index);
        r
    }

    /// Generator for product component `i`: starts `i · 2^48` words in.
    pub fn substream(&self, i: usize) -> StreamRng {
        let mut r = self.rng();
        r.set_word_pos((i as u128) << SUBSTREAM_SHIFT);
        r
    }
}
