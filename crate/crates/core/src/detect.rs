//! Generic maximum-likelihood detection.
//!
//! Every scheme enumerates its legal transmit hypotheses as the integers
//! `0..2^SE`: the ordinal of a hypothesis is exactly the frame's bit string
//! read most-significant-first. Detection returns the ordinal minimizing the
//! Euclidean distance to the received vector, so the Hamming distance
//! between transmitted and detected frames is one XOR-popcount away.

use alloc::vec;

use crate::error::{Error, Result};
use crate::C64;

/// An enumerable set of transmit hypotheses and their noiseless receive
/// vectors under the current channel realization.
pub trait HypothesisSet {
    /// Number of hypotheses (`2^SE` for a full scheme).
    fn count(&self) -> usize;

    /// Receive-vector dimension.
    fn dim(&self) -> usize;

    /// Writes the noiseless receive vector of hypothesis `ordinal`.
    fn write_rx(&self, ordinal: usize, out: &mut [C64]);
}

/// Ordinal of `argmin_h ‖y − ŷ(h)‖²`; ties break toward the lowest ordinal.
pub fn ml_detect<H: HypothesisSet>(y: &[C64], set: &H) -> Result<usize> {
    if set.count() == 0 {
        return Err(Error::invalid("empty hypothesis set"));
    }
    if y.len() != set.dim() {
        return Err(Error::invalid("received vector dimension mismatch"));
    }
    let mut buf = vec![C64::new(0.0, 0.0); set.dim()];
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for ord in 0..set.count() {
        set.write_rx(ord, &mut buf);
        let mut d = 0.0;
        for (a, b) in y.iter().zip(buf.iter()) {
            d += (a - b).norm_sqr();
        }
        if d < best_d {
            best_d = d;
            best = ord;
        }
    }
    Ok(best)
}
