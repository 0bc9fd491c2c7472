//! Seed-derived random streams.
//!
//! Every experiment component draws from its own ChaCha stream keyed by a
//! numeric seed and a label, so adding a model or a draw in one component
//! never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a, stable across platforms and compiler versions.
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3))
}

/// Deterministic stream for `(seed, label)`.
pub fn stream(seed: u64, label: &str) -> Rng {
    Rng::seed_from_u64(splitmix64(seed ^ splitmix64(label_hash(label))))
}

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
