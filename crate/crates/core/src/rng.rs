//! Seed plumbing. Every random decision in the crate flows from a `u64` seed
//! through [`derive_seed`], so a master seed fully determines a battery.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent child seed for `stream` from `parent`.
pub fn derive_seed(parent: u64, stream: u64) -> u64 {
    mix64(parent ^ mix64(stream.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Named sub-streams so call sites do not collide by accident.
pub mod stream {
    pub const INSTANCE: u64 = 1;
    pub const RELABEL: u64 = 2;
    pub const DETECTOR: u64 = 3;
    pub const NEIGHBOR_ORDER: u64 = 4;
    pub const CORRUPT: u64 = 5;
    pub const TRIAL: u64 = 6;
    pub const GOOD_INDEX: u64 = 7;
    pub const REPLICATE: u64 = 8;
}
