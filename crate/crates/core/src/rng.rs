//! Deterministic random streams.
//!
//! All randomness flows from a single master seed through [`SeedStream`].
//! A stream is a 64-bit key; child streams are derived by mixing the key with
//! a tag (SplitMix64 finalizer), and the generator for replicate `i` is
//! ChaCha8 keyed by the stream with its 64-bit stream id set to `i`.
//! Results therefore depend only on (seed, tag path, replicate index), never
//! on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream {
    key: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { key: seed }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Derives an independent child stream.
    pub fn child(&self, tag: u64) -> Self {
        Self {
            key: splitmix64(self.key ^ splitmix64(tag.wrapping_add(0x6a09_e667_f3bc_c909))),
        }
    }

    /// Derives a child stream from a string tag (feature names, statistic names).
    pub fn child_str(&self, tag: &str) -> Self {
        self.child(fnv1a(tag.as_bytes()))
    }

    /// Generator for replicate `index` of this stream.
    pub fn rng(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(index);
        rng
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}
