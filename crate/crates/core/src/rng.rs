//! Seeded, splittable randomness.
//!
//! Every random draw in the crate goes through [`stream_rng`]: a ChaCha20
//! generator keyed by the user seed, with an independent stream per logical
//! consumer (restart index, grid point, reference state, ...). Two calls with
//! the same `(seed, stream)` always produce the same sequence, regardless of
//! thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Rng = ChaCha20Rng;

pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed; used where an API takes a plain seed but the caller
/// needs many independent ones (e.g. one per restart).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
