//! Seeded random streams.
//!
//! A single `u64` seed identifies a simulated world. Independent consumers
//! (deployment sampling, RSSI noise) each read from their own ChaCha stream
//! of that seed, so drawing more noise never shifts node placement.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Deployment,
    Noise,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Deployment => 1,
            Stream::Noise => 2,
        }
    }
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which.id());
    rng
}

/// SplitMix64 finalizer, used to spread structured inputs over the seed space.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of run `run_index` at the given density.
pub fn run_seed(base_seed: u64, density: usize, run_index: usize) -> u64 {
    base_seed ^ mix64(((density as u64) << 32) | (run_index as u64 & 0xffff_ffff))
}
