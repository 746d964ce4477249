//! Counter-based seed derivation.
//!
//! Every random stream is keyed by `(master, stream, ...)` through a
//! SplitMix64 finaliser, so adding a strategy or a population size never
//! shifts the draws of any other cell.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Values are part of the output contract; do not renumber.
pub mod stream {
    pub const DEVICE_POSITIONS: u64 = 1;
    pub const SECRECY_DEMANDS: u64 = 2;
    pub const STRATEGY: u64 = 3;
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(master), |acc, &k| mix(acc ^ mix(k)))
}

pub fn derive_rng(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}
