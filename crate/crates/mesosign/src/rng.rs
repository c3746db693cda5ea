//! Named, reproducible random-number streams.
//!
//! Every stochastic operation in the crate derives its generator from a user
//! seed plus a fixed stream tag and the task indices (restart number, sample
//! number, sweep cell, ...). Two runs with the same seed therefore produce
//! identical results, and parallel workers never share generator state.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream tags, one per stochastic subsystem.
pub mod stream {
    pub const LOUVAIN: u64 = 0x4c4f_5556;
    pub const SPECTRAL: u64 = 0x5350_4543;
    pub const BLOCKMODEL: u64 = 0x5342_4d46;
    pub const BLOCKMODEL_SAMPLE: u64 = 0x5342_4d53;
    pub const BOOTSTRAP: u64 = 0x424f_4f54;
    pub const SIGN_SHUFFLE: u64 = 0x5348_5546;
    pub const PLANTED: u64 = 0x504c_414e;
    pub const SWEEP: u64 = 0x5357_4550;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Mix a base seed and a sequence of tags into a single derived seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix64(seed);
    for &t in tags {
        s = splitmix64(s ^ splitmix64(t));
    }
    s
}

/// A generator for the stream identified by `(seed, tags)`.
pub fn stream_rng(seed: u64, tags: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(seed, tags))
}
