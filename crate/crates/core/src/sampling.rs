//! Seeded pseudo-random streams.
//!
//! Sample `i` of a run draws from its own ChaCha8 stream, so results are
//! identical however the samples are split across workers.

use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rat::{pow2, Rat};

pub const GENERATOR: &str = "chacha8";

/// Bits of resolution for uniform rationals.
pub const UNIFORM_BITS: u32 = 48;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform dyadic rational in `[lo, hi)`.
pub fn uniform_rat(rng: &mut impl Rng, lo: &Rat, hi: &Rat) -> Rat {
    let k: u64 = rng.random_range(0..(1u64 << UNIFORM_BITS));
    lo + (hi - lo) * Rat::new(BigInt::from(k), pow2(UNIFORM_BITS))
}

pub fn uniform_index(rng: &mut impl Rng, lo: u64, hi_inclusive: u64) -> u64 {
    rng.random_range(lo..=hi_inclusive)
}
