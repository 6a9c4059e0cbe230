//! Seeded randomness.
//!
//! Every stochastic operation owns a [`ChaCha8Rng`] built from a `u64` seed,
//! so results are identical across platforms and thread schedules. Sub-seeds
//! for independent streams (pair `k` of a batch, the weight search of a
//! variation, ...) are derived with SplitMix64 mixing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent seed from `base` and a path of stream labels.
pub fn derive(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}
