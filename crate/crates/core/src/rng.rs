//! Deterministic random number generation.
//!
//! All randomness in a sweep flows from one 64-bit master seed. Worker
//! generators are derived from `(seed, stream)` where the stream index packs
//! the SNR-grid position and the frame-chunk index, so results are
//! reproducible bit-for-bit regardless of how chunks are scheduled across
//! threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Seeded generator with independent, reproducible streams.
#[derive(Clone, Debug)]
pub struct SimRng(ChaCha8Rng);

impl SimRng {
    /// Generator for stream 0 of `seed`.
    pub fn new(seed: u64) -> Self {
        SimRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Generator for the chunk at `(snr_idx, chunk_idx)` of a sweep.
    ///
    /// The stream number is `snr_idx << 32 | chunk_idx`: every chunk of every
    /// sweep point owns a distinct ChaCha stream of the same master seed.
    pub fn for_chunk(seed: u64, snr_idx: u32, chunk_idx: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((snr_idx as u64) << 32) | chunk_idx as u64);
        SimRng(rng)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform sample in `[0, 1)` with 53 random mantissa bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Fills `out` with uniform bits (values 0 or 1).
    ///
    /// Bits are taken most-significant-first from consecutive `u64` words; a
    /// fresh word is started on every call so the output depends only on the
    /// generator state and `out.len()`.
    pub fn fill_bits(&mut self, out: &mut [u8]) {
        let mut i = 0;
        while i < out.len() {
            let word = self.next_u64();
            let take = core::cmp::min(64, out.len() - i);
            for b in 0..take {
                out[i + b] = ((word >> (63 - b)) & 1) as u8;
            }
            i += take;
        }
    }

    /// Two independent standard normal samples (Marsaglia's polar method).
    pub fn gauss_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = libm::sqrt(-2.0 * libm::log(s) / s);
                return (u * f, v * f);
            }
        }
    }
}
