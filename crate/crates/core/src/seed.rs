//! Deterministic seed derivation.
//!
//! All randomness in the crate flows from a single master seed. Sub-streams
//! (per trial, per construction attempt) are derived with [`mix`], so results
//! are reproducible regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mixes a master seed with a stream index into an independent sub-seed.
pub fn mix(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Random stream for one trial, derived from `(master_seed, trial_index)`.
pub fn trial_rng(master: u64, trial_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(master, trial_index))
}
