//! Splittable seeding.
//!
//! A single 64-bit seed is expanded into independent ChaCha streams by
//! hashing a path of tags, e.g. `(seed, trial, phase, subset)`, through
//! SplitMix64. A stream depends only on its path, never on the order in
//! which streams are created, so concurrent scheduling cannot change results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Well-known phase tags for the tester pipeline.
pub mod phase {
    pub const PARTITION: u64 = 1;
    pub const ALPHA: u64 = 2;
    pub const ESTIMATION: u64 = 3;
    pub const CLOSENESS: u64 = 4;
    pub const LEARNER: u64 = 5;
    pub const FAMILY: u64 = 6;
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a tag path into a 64-bit key.
pub fn derive(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |acc, &tag| splitmix64(acc ^ splitmix64(tag)))
}

pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, path))
}
