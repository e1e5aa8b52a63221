//! Seeded, splittable random source.
//!
//! Every stream is a ChaCha8 keystream keyed from a 64-bit seed. `split`
//! derives a child seed from the parent seed and a stream id only, so the
//! child does not depend on how much of the parent has been consumed. A
//! whole session therefore replays from its master seed no matter in which
//! order per-party or per-copy streams are drawn.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream identified by `stream`.
    pub fn split(&self, stream: u64) -> Rng {
        Rng::new(mix(self.seed ^ mix(stream)))
    }

    /// Uniform draw from `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform draw from `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// `amount` distinct indices from `0..len`, in ascending order.
    pub fn choose_indices(&mut self, len: usize, amount: usize) -> Vec<usize> {
        let mut idx = rand::seq::index::sample(&mut self.inner, len, amount).into_vec();
        idx.sort_unstable();
        idx
    }
}
