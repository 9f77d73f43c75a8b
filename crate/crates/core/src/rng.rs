//! Seed derivation for reproducible randomness.
//!
//! Every stochastic stage (split shuffles, per-class SVM epochs, per-tree
//! bootstraps, MLP init) gets its own generator derived from the user seed
//! and a stream tag. Results therefore do not depend on how work is
//! scheduled across threads: a worker never shares a generator with
//! another worker.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Spaced out so per-item offsets (label index, tree index,
/// class index) cannot collide across stages.
pub(crate) const STREAM_SPLIT: u64 = 0x1000;
pub(crate) const STREAM_SVM: u64 = 0x2000;
pub(crate) const STREAM_FOREST: u64 = 0x3000;
pub(crate) const STREAM_MLP: u64 = 0x4000;
pub(crate) const STREAM_SYNTH: u64 = 0x5000;

/// splitmix64 finalizer; full-period mixing of a 64-bit value.
fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed for `stream` from a user-facing seed.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

/// Derive an independent generator for `stream`.
pub(crate) fn derive_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}
