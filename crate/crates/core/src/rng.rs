//! Seeded, counter-based random streams.
//!
//! Every Monte Carlo trial draws from its own ChaCha20 stream, addressed by
//! the master seed plus a tuple of indices. Results therefore do not depend
//! on how trials are scheduled across threads.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub const ALGORITHM: &str = "chacha20";

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes an index path into a 64-bit stream id.
pub fn stream_id(path: &[u64]) -> u64 {
    let mut state = 0x5EED_0F57_2EA4_u64 ^ path.len() as u64;
    let mut acc = splitmix64(&mut state);
    for &p in path {
        state ^= p;
        acc ^= splitmix64(&mut state).rotate_left(17);
    }
    acc
}

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    stream: u64,
    inner: ChaCha20Rng,
}

impl Rng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha20Rng::from_seed(key);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    /// Stream for one trial, identified by an index path under `seed`.
    pub fn for_trial(seed: u64, path: &[u64]) -> Self {
        Self::new(seed, stream_id(path))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn algorithm(&self) -> &'static str {
        ALGORITHM
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn bit(&mut self) -> u8 {
        (self.inner.next_u32() >> 31) as u8
    }

    pub fn gaussian(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}
