//! Seeding conventions.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded
//! with `seed_from_u64` and split into independent numbered streams with
//! `set_stream`. Replicate and restart seeds are derived from a base seed
//! with [`derive_seed`], a SplitMix64 finalizer over `(base, index)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used for community labels when sampling.
pub const LABEL_STREAM: u64 = 0;
/// Stream used for edges when sampling.
pub const EDGE_STREAM: u64 = 1;
/// Stream used by the search procedures.
pub const SEARCH_STREAM: u64 = 2;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// `splitmix64(base ^ splitmix64(index))`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
