//! Uniform draws keyed by `(seed, stream, time, node)`.
//!
//! A trial owns one ChaCha8 stream selected by its index, and the uniform for
//! `(t, i)` is the 64-bit word at position `(t - 1)·N + i` of that stream, so a
//! trial's draws do not depend on which worker runs it or in what order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maps a random word to `[0, 1)` with 53 bits of precision.
#[inline]
pub fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Stream id for a trial; arms run with independent randomness get disjoint ids.
pub fn stream_id(trial: usize, arm: Option<usize>) -> u64 {
    let arm = arm.map_or(0, |a| a as u64 + 1);
    (arm << 40) | trial as u64
}

#[derive(Debug, Clone)]
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Fills `out` with the next `out.len()` uniforms.
    pub fn fill(&mut self, out: &mut [f64]) {
        for y in out {
            *y = unit_f64(self.rng.next_u64());
        }
    }
}

/// The uniform used by node `node` (0-based) at time `t` (1-based) in a network
/// of `n` nodes. Sequential [`UniformStream::fill`] calls of width `n` produce
/// exactly these values.
pub fn uniform_at(seed: u64, stream: u64, t: usize, node: usize, n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    // Word positions count 32-bit words.
    rng.set_word_pos(2 * ((t - 1) * n + node) as u128);
    unit_f64(rng.next_u64())
}
