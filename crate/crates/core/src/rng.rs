//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! `(seed, stream)` pair. ChaCha is counter based, so distinct stream ids give
//! independent sequences without any shared state between replicas.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Purposes multiplexed into the low byte of a stream id.
pub mod purpose {
    pub const FIELD: u64 = 1;
    pub const TARGETS: u64 = 2;
    pub const MARKOV: u64 = 3;
    pub const RENEWAL: u64 = 4;
    pub const CHAIN: u64 = 5;
    pub const HEURISTIC: u64 = 6;
    pub const GEOMETRY: u64 = 7;
    pub const WEIGHTS: u64 = 8;
    pub const PROBES: u64 = 9;
}

pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for a given replica and purpose.
pub fn replica_stream(replica: u64, purpose: u64) -> u64 {
    (replica << 8) | (purpose & 0xff)
}
