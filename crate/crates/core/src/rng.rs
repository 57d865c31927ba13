//! Seeded random streams.
//!
//! All randomness comes from ChaCha8 seeded with `ChaCha8Rng::seed_from_u64`.
//! One seed owns 2^64 independent streams: stream 0 carries global draws
//! (casting voters, base graphs, point clouds), stream `1 + v` carries the
//! draws of voter `v`, and the top streams derive child seeds for batches.
//! Results are therefore identical across platforms and independent of how
//! work is scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub const GLOBAL_STREAM: u64 = 0;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn global(seed: u64) -> Rng {
    stream(seed, GLOBAL_STREAM)
}

pub fn voter_stream(seed: u64, voter: usize) -> Rng {
    stream(seed, 1 + voter as u64)
}

/// Seed of the `i`-th child of a batch.
pub fn child_seed(seed: u64, i: u64) -> u64 {
    stream(seed, u64::MAX - i).next_u64()
}
