//! Keyed random streams.
//!
//! A stream is ChaCha8 keyed by a seed, with the trajectory as the ChaCha
//! stream id and the position measured in 64-bit draws. Any block of a
//! trajectory can be regenerated without replaying what came before it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    /// Stream `stream` of `seed`, positioned at draw `draw`.
    pub fn at(seed: u64, stream: u64, draw: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng.set_word_pos(2 * draw as u128);
        Stream { rng }
    }

    pub fn new(seed: u64, stream: u64) -> Self {
        Self::at(seed, stream, 0)
    }

    /// Index of the next draw.
    pub fn position(&self) -> u64 {
        (self.rng.get_word_pos() / 2) as u64
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        unit(self.next_u64())
    }

    /// Uniform on `0..n`.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        below(self.next_u64(), n)
    }

    #[inline]
    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}

#[inline]
pub(crate) fn unit(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Map a uniform `u64` onto `0..n` by widening multiplication.
#[inline]
pub(crate) fn below(u: u64, n: usize) -> usize {
    ((u as u128 * n as u128) >> 64) as usize
}

impl RngCore for Stream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
