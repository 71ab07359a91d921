//! Seed derivation and random streams.
//!
//! Every random quantity in the crate comes from a ChaCha8 generator keyed by
//! a 64-bit seed and addressed by a 64-bit stream id. Streams of the same key
//! are independent, so no generator state is ever shared:
//!
//! * replicate `r` of a run with master seed `m` uses the key
//!   [`derive_seed`]`(m, r)`;
//! * dimension `j` of a Wiener path uses stream `j`;
//! * the `k`-th Brownian-bridge refinement of dimension `j` uses stream
//!   `(k << 32) | j`.
//!
//! The dimension-per-stream layout means column `j` of a `d`-dimensional
//! path is identical to column `j` of any wider path drawn with the same seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `replicate` of a run keyed by `master`.
///
/// This is the SplitMix64 output at counter position `replicate + 1` of the
/// sequence started at `master`, so it is a pure function of both inputs.
pub fn derive_seed(master: u64, replicate: u64) -> u64 {
    mix64(master.wrapping_add(replicate.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub(crate) fn stream_id(dim: usize, refinement: u32) -> u64 {
    ((refinement as u64) << 32) | dim as u64
}

pub(crate) fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
