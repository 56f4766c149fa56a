//! Keyed random substreams.
//!
//! Every Monte Carlo quantity draws from a ChaCha8 stream whose seed is a
//! mix of the run seed and a tuple of tags (component, state, block, ...).
//! Two computations with the same key see the same draws no matter which
//! thread runs them or in which order.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random stream handed to samplers.
pub type Stream = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a 64-bit key from a base seed and a list of tags.
pub fn mix(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(seed), |acc, &tag| splitmix64(acc ^ splitmix64(tag)))
}

/// Opens the substream identified by `(seed, tags)`.
pub fn substream(seed: u64, tags: &[u64]) -> Stream {
    ChaCha8Rng::seed_from_u64(mix(seed, tags))
}

/// Uniform draw on the open interval (0, 1).
#[inline]
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

/// Stable tags for the different Monte Carlo consumers.
pub(crate) mod tag {
    pub const COST_TABLE: u64 = 0x7461_626c;
    pub const RENEWAL: u64 = 0x7265_6e77;
    pub const INTERVAL: u64 = 0x696e_7476;
    pub const LIVES: u64 = 0x6c69_7665;
    pub const REPLICATION: u64 = 0x7265_706c;
}
