//! Reproducible random streams.
//!
//! Every independent unit of work (a sweep point, a bootstrap replicate, a
//! protocol shard) draws from its own generator whose seed is a pure function
//! of the run seed and the unit's coordinates. Parallel execution therefore
//! yields the same numbers as a sequential one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream domains, so that e.g. replicate 3 of a bootstrap never shares a
/// stream with sweep point 3.
pub mod domain {
    pub const SWEEP: u64 = 0x0053_5745_4550;
    pub const PROTOCOL: u64 = 0x0050_524f_544f;
    pub const MONTE_CARLO: u64 = 0x4d43_4349;
    pub const BOOTSTRAP: u64 = 0x424f_4f54;
    pub const TRAJECTORY: u64 = 0x5452_414a;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a path of coordinates.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}
