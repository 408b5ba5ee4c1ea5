//! Fixed, named pseudo-random generator for reproducible sampling.
//!
//! Campaign claims must be replayable, so the generator and its stream
//! discipline are pinned: a ChaCha8 stream seeded with the campaign seed,
//! consumed strictly through `next_u64`, with bounded draws made unbiased
//! by Lemire rejection. The generator name is recorded in result metadata.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator identifier recorded in campaign metadata.
pub const GENERATOR_NAME: &str = "chacha8-lemire-v1";

pub struct SampleStream {
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        SampleStream { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` from the top 53 bits of one `u64`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform draw in `[0, bound)`. One `u64` per draw in the
    /// common case; rejection only near the biased edge.
    pub fn bounded(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bounded(0) is meaningless");
        let mut x = self.next_u64();
        let mut m = (x as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }
}
