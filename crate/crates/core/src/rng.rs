//! Seeded random streams.
//!
//! Every generator in the crate draws from [`RigRng`], which is ChaCha with
//! eight rounds. ChaCha is counter based, so a stream is fully determined by
//! its 64-bit seed. Replications derive their seed by mixing the master seed
//! with the replication coordinates through SplitMix64, which makes the
//! stream of replication `(g, r)` independent of how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RigRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a stream seed from a master seed and a path of indices,
/// e.g. `stream_seed(master, &[grid_index, rep_index])`.
pub fn stream_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = mix64(master.wrapping_add(GOLDEN_GAMMA));
    for &idx in path {
        h = mix64(h ^ mix64(idx.wrapping_add(GOLDEN_GAMMA)).wrapping_add(GOLDEN_GAMMA));
    }
    h
}

pub fn rng_from_seed(seed: u64) -> RigRng {
    RigRng::seed_from_u64(seed)
}

pub fn stream(master: u64, path: &[u64]) -> RigRng {
    rng_from_seed(stream_seed(master, path))
}
