//! Keyed counter-based random numbers (Philox4x32-10).
//!
//! Every output is a pure function of `(key, stream_id, counter)`, so draws can
//! be replayed in any order. Walk tasks use their query id as the stream and
//! encode `(hop, draw)` in the counter, which makes sampling independent of the
//! pipeline that happens to execute a hop.

use serde::{Deserialize, Serialize};

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;
const ROUNDS: usize = 10;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = (a as u64) * (b as u64);
    ((p >> 32) as u32, p as u32)
}

/// One Philox4x32-10 block.
pub fn philox4x32(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = ctr;
    let mut k = key;
    for round in 0..ROUNDS {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

/// Derives a generator key from a user-facing seed.
pub fn key_from_seed(seed: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A replayable stream of 64-bit uniforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub key: u64,
    pub stream_id: u64,
    pub counter: u64,
}

impl RngStream {
    pub fn new(key: u64, stream_id: u64) -> Self {
        Self::at(key, stream_id, 0)
    }

    pub fn at(key: u64, stream_id: u64, counter: u64) -> Self {
        Self {
            key,
            stream_id,
            counter,
        }
    }

    /// Output at the current counter, without advancing.
    #[inline]
    pub fn peek(&self) -> u64 {
        let out = philox4x32(
            [
                self.counter as u32,
                (self.counter >> 32) as u32,
                self.stream_id as u32,
                (self.stream_id >> 32) as u32,
            ],
            [self.key as u32, (self.key >> 32) as u32],
        );
        (out[0] as u64) | ((out[1] as u64) << 32)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = self.peek();
        self.counter = self.counter.wrapping_add(1);
        v
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }
}

/// Functional form: returns the draw and the advanced stream.
pub fn rng_next(stream: RngStream) -> (u64, RngStream) {
    let mut s = stream;
    let v = s.next_u64();
    (v, s)
}

/// Maps a raw 64-bit draw to `[0, 1)`.
#[inline]
pub fn unit_f64(r: u64) -> f64 {
    (r >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
