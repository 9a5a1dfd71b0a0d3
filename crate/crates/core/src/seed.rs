//! Counter-based seed derivation.
//!
//! A single global seed fans out into independent per-purpose streams keyed
//! by `(purpose, a, b, c)`. Draws for round `t` never depend on how many
//! rounds are simulated, so extending a horizon leaves earlier draws intact.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a random stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Graph = 1,
    Placement = 2,
    Adversary = 3,
    Noise = 4,
    Gains = 5,
    Initial = 6,
    ReducedSample = 7,
    Synthetic = 8,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a seed with a purpose tag and up to three counters.
pub fn derive(seed: u64, purpose: Purpose, a: u64, b: u64, c: u64) -> u64 {
    let mut h = splitmix64(seed ^ (purpose as u64).wrapping_mul(0xd6e8_feb8_6659_fd93));
    for word in [a, b, c] {
        h = splitmix64(h ^ word);
    }
    h
}

/// A fresh generator for the stream `(seed, purpose, a, b, c)`.
pub fn stream(seed: u64, purpose: Purpose, a: u64, b: u64, c: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, purpose, a, b, c))
}
