//! Seed derivation and per-node uniform streams.
//!
//! `derive_seed(master, i)` is SplitMix64 applied to `master + φ·(i + 1)` where
//! `φ = 0x9E3779B97F4A7C15`; external tools can reproduce a single iteration
//! from the master seed with these few lines.

use rand::distributions::{Distribution as _, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of iteration `i` under `master`.
pub fn derive_seed(master: u64, i: u64) -> u64 {
    splitmix64(master.wrapping_add(GOLDEN.wrapping_mul(i.wrapping_add(1))))
}

/// Seed of the burn-in draw that calibrates a graph sampled under `seed`.
pub fn calibration_seed(seed: u64) -> u64 {
    derive_seed(seed, u64::MAX)
}

/// FNV-1a, used to give every node name a stable stream id.
pub fn name_hash(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Independent uniform stream of one node under a master seed.
pub fn node_stream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(name_hash(name));
    rng
}

/// `n` draws from `Unif(0, 1)`, both ends excluded.
pub fn node_errors(seed: u64, name: &str, n: usize) -> Vec<f64> {
    let mut rng = node_stream(seed, name);
    (0..n).map(|_| Open01.sample(&mut rng)).collect()
}

/// General-purpose generator for a labelled purpose under a seed.
pub fn purpose_rng(seed: u64, purpose: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(name_hash(purpose) ^ 0xA5A5_A5A5_A5A5_A5A5);
    rng
}
