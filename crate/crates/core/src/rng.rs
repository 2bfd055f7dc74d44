//! Counter-based, splittable PRNG.
//!
//! Every random draw in the engine flows through an explicit [`RngState`].
//! Output `k` of a stream is `mix(seed + k * GOLDEN)`, so a stream is fully
//! described by `(seed, counter)` and child streams are derived by hashing a
//! tag into the parent seed. Same inputs, same numbers, on every platform.

use serde::{Deserialize, Serialize};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const M1: u64 = 0xbf58_476d_1ce4_e5b9;
const M2: u64 = 0x94d0_49bb_1331_11eb;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(M1);
    z = (z ^ (z >> 27)).wrapping_mul(M2);
    z ^ (z >> 31)
}

/// Subsystem tags used when splitting a per-step stream.
pub mod tags {
    pub const WORLDGEN: u64 = 0x01;
    pub const STEP: u64 = 0x02;
    pub const ACTIONS: u64 = 0x03;
    pub const WORLD: u64 = 0x04;
    pub const EPISODE: u64 = 0x05;
    pub const POLICY: u64 = 0x06;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub counter: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed: mix(seed ^ 0x5eed_5eed_5eed_5eed),
            counter: 0,
        }
    }

    /// Independent child stream identified by `tag`. Does not advance `self`.
    pub fn split(&self, tag: u64) -> Self {
        Self {
            seed: mix(self.seed ^ mix(tag.wrapping_add(GOLDEN))),
            counter: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform integer in `0..n`. `n` must be non-zero.
    #[inline]
    pub fn below(&mut self, n: u32) -> u32 {
        debug_assert!(n > 0);
        // Lemire's multiply-shift; the bias is < 2^-32 and irrelevant here.
        (((self.next_u64() >> 32) * n as u64) >> 32) as u32
    }

    /// Uniform float in `[0, 1)` with 24 bits of precision.
    #[inline]
    pub fn unit(&mut self) -> f32 {
        (self.next_u64() >> 40) as f32 * (1.0 / (1u64 << 24) as f32)
    }

    #[inline]
    pub fn chance(&mut self, p: f32) -> bool {
        self.unit() < p
    }
}
