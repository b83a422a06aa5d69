//! Seeded random-number plumbing.
//!
//! All sampling in this crate runs on a ChaCha8 stream seeded from a caller
//! `u64`, with uniform variates formed from the top 53 bits of each draw.
//! The generator and the mapping are fixed so that a (seed, n) pair always
//! reproduces the same sequence, across platforms and releases.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from `[0, 1)` using 53 random bits.
pub(crate) fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    (rng.next_u64() >> 11) as f64 * SCALE
}
