//! Deterministic random streams.
//!
//! Every random draw in the simulator comes from a [`ChaCha8Rng`] keyed by
//! the master seed, a [`Stream`] tag and a short list of indices (sweep point,
//! episode, slot, link endpoints ...). Streams never share state, so adding
//! draws to one concern cannot shift the values another concern observes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Placement = 1,
    Endpoints = 2,
    Fading = 3,
    HopSuccess = 4,
    Exploration = 5,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes the master seed, stream tag and indices into one 64-bit key.
pub fn derive_seed(master: u64, stream: Stream, indices: &[u64]) -> u64 {
    let mut h = splitmix(master ^ (stream as u64).wrapping_mul(GOLDEN));
    for &i in indices {
        h = splitmix(h ^ splitmix(i));
    }
    h
}

pub fn stream(master: u64, stream: Stream, indices: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, indices))
}
