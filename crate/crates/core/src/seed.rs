//! Portable seed derivation.
//!
//! Every stochastic call is driven by a 64-bit seed derived from the run seed
//! with SplitMix64, so replays only need the run seed and the call index:
//!
//! ```text
//! mix(x)       = SplitMix64 finaliser of (x + 0x9E3779B97F4A7C15)
//! call_seed    = mix(run_seed ^ mix(call_index))
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_call_seed(run_seed: u64, call_index: u64) -> u64 {
    splitmix64(run_seed ^ splitmix64(call_index))
}

/// Folds several labels into one seed; order matters.
pub fn derive_seed(run_seed: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(run_seed), |acc, &l| derive_call_seed(acc, l))
}

/// Stable 64-bit label for a string (FNV-1a).
pub fn label(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
