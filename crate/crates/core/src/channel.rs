//! Flat Rayleigh fading channel generation and SNR bookkeeping.
//!
//! All coefficients are i.i.d. `CN(0,1)`. A new realization is drawn for
//! every channel use (block fading with block length one). SNR is `Es/N0`
//! with unit average transmit (or feed) symbol energy: `n0 = 10^(−snr/10)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{cgauss_one, CMat};
use crate::rng::SimRng;
use crate::C64;

/// `N_R × N_T` channel matrix with i.i.d. `CN(0,1)` entries, drawn row by
/// row.
pub fn sample_mimo(nr: usize, nt: usize, rng: &mut SimRng) -> Result<CMat> {
    if nr == 0 || nt == 0 {
        return Err(Error::invalid("channel dimensions must be >= 1"));
    }
    let mut m = CMat::zeros(nr, nt);
    for r in 0..nr {
        for t in 0..nt {
            m.set(r, t, cgauss_one(rng));
        }
    }
    Ok(m)
}

/// Element-to-receiver gains of an `N`-element surface seen by `N_R`
/// antennas, with the elements partitioned into `N_G` consecutive groups of
/// `N/N_G` perfectly correlated elements: all elements of a group share one
/// `CN(0,1)` coefficient per receive antenna, and distinct (group, antenna)
/// coefficients are independent.
#[derive(Clone, Debug)]
pub struct RisChannel {
    n: usize,
    ng: usize,
    nr: usize,
    /// `nr × ng`, row-major: `coeff[r*ng + g]`.
    coeff: Vec<C64>,
}

impl RisChannel {
    /// Builds a channel from explicit group coefficients (`nr × ng`,
    /// row-major / antenna-major).
    pub fn from_coeff(n: usize, nr: usize, ng: usize, coeff: Vec<C64>) -> Result<Self> {
        if n == 0 || nr == 0 || ng == 0 || n % ng != 0 {
            return Err(Error::invalid("RIS channel dimensions must be >= 1 with N_G | N"));
        }
        if coeff.len() != nr * ng {
            return Err(Error::invalid("RIS coefficient count must be N_R * N_G"));
        }
        Ok(RisChannel { n, ng, nr, coeff })
    }

    #[inline]
    pub fn elements(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn groups(&self) -> usize {
        self.ng
    }

    #[inline]
    pub fn receive_antennas(&self) -> usize {
        self.nr
    }

    /// Elements per group.
    #[inline]
    pub fn group_size(&self) -> usize {
        self.n / self.ng
    }

    /// Coefficient of group `g` at receive antenna `r`.
    #[inline]
    pub fn group(&self, r: usize, g: usize) -> C64 {
        self.coeff[r * self.ng + g]
    }

    /// All group coefficients of receive antenna `r`.
    #[inline]
    pub fn row(&self, r: usize) -> &[C64] {
        &self.coeff[r * self.ng..(r + 1) * self.ng]
    }

    /// Per-element gain `h_{r,e}` (elements of a group share their group's
    /// coefficient).
    #[inline]
    pub fn elem(&self, r: usize, e: usize) -> C64 {
        self.group(r, e / self.group_size())
    }
}

/// Draws a grouped RIS channel (coefficients row by row, i.e. antenna-major).
pub fn sample_ris(n: usize, nr: usize, ng: usize, rng: &mut SimRng) -> Result<RisChannel> {
    if n == 0 || nr == 0 || ng == 0 {
        return Err(Error::invalid("RIS channel dimensions must be >= 1"));
    }
    if n % ng != 0 {
        return Err(Error::invalid("N_G must divide N"));
    }
    let mut coeff = Vec::with_capacity(nr * ng);
    for _ in 0..nr * ng {
        coeff.push(cgauss_one(rng));
    }
    Ok(RisChannel { n, ng, nr, coeff })
}

/// Per-state channels of an MBM transmitter: `2^mirrors` rows (one radiation
/// state each) of `N_R` i.i.d. `CN(0,1)` gains.
pub fn sample_mbm_states(mirrors: usize, nr: usize, rng: &mut SimRng) -> Result<CMat> {
    if mirrors == 0 || mirrors > 16 || nr == 0 {
        return Err(Error::invalid("MBM requires 1 <= mirrors <= 16 and N_R >= 1"));
    }
    sample_mimo(1usize << mirrors, nr, rng)
}

/// Noise spectral density for an `Es/N0` value in dB.
#[inline]
pub fn snr_to_n0(snr_db: f64) -> f64 {
    libm::pow(10.0, -snr_db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_conversions() {
        assert!((snr_to_n0(0.0) - 1.0).abs() < 1e-15);
        assert!((snr_to_n0(10.0) - 0.1).abs() < 1e-15);
        assert!((snr_to_n0(3.0) - 0.5011872336272722).abs() < 1e-12);
    }

    #[test]
    fn mimo_unit_variance() {
        let mut rng = SimRng::new(7);
        let mut p = 0.0;
        let n = 1_000_000usize;
        for _ in 0..n {
            p += sample_mimo(1, 1, &mut rng).unwrap().at(0, 0).norm_sqr();
        }
        p /= n as f64;
        assert!((p - 1.0).abs() < 0.01, "E|h|^2 = {p}");
    }

    #[test]
    fn mimo_entries_uncorrelated() {
        // 2×4 channel: all 28 entry pairs have |sample correlation| < 0.01.
        let mut rng = SimRng::new(8);
        let draws = 1_000_000usize;
        let mut cross = [[C64::new(0.0, 0.0); 8]; 8];
        let mut power = [0.0f64; 8];
        for _ in 0..draws {
            let h = sample_mimo(2, 4, &mut rng).unwrap();
            let mut flat = [C64::new(0.0, 0.0); 8];
            for r in 0..2 {
                for t in 0..4 {
                    flat[r * 4 + t] = h.at(r, t);
                }
            }
            for i in 0..8 {
                power[i] += flat[i].norm_sqr();
                for j in i + 1..8 {
                    cross[i][j] += flat[i] * flat[j].conj();
                }
            }
        }
        for i in 0..8 {
            for j in i + 1..8 {
                let rho = cross[i][j].norm() / libm::sqrt(power[i] * power[j]);
                assert!(rho < 0.01, "entries {i},{j}: |rho| = {rho}");
            }
        }
    }

    #[test]
    fn mimo_deterministic() {
        let a = sample_mimo(3, 5, &mut SimRng::new(9)).unwrap();
        let b = sample_mimo(3, 5, &mut SimRng::new(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ris_ungrouped_is_iid() {
        let mut rng = SimRng::new(10);
        let ch = sample_ris(128, 1, 128, &mut rng).unwrap();
        assert_eq!(ch.group_size(), 1);
        // no two coefficients equal
        for g in 0..127 {
            assert_ne!(ch.group(0, g), ch.group(0, g + 1));
        }
    }

    #[test]
    fn ris_grouping_repeats_coefficients() {
        let mut rng = SimRng::new(11);
        let ch = sample_ris(128, 1, 4, &mut rng).unwrap();
        assert_eq!(ch.group_size(), 32);
        let mut distinct: Vec<C64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for e in 0..128 {
            let h = ch.elem(0, e);
            match distinct.iter().position(|&d| d == h) {
                Some(i) => counts[i] += 1,
                None => {
                    distinct.push(h);
                    counts.push(1);
                }
            }
        }
        assert_eq!(distinct.len(), 4);
        assert!(counts.iter().all(|&c| c == 32));
    }

    #[test]
    fn ris_two_by_two_independent() {
        let mut rng = SimRng::new(12);
        let ch = sample_ris(2, 2, 2, &mut rng).unwrap();
        let all = [ch.group(0, 0), ch.group(0, 1), ch.group(1, 0), ch.group(1, 1)];
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(all[i], all[j]);
            }
        }
    }

    #[test]
    fn ris_population_variance() {
        let mut rng = SimRng::new(13);
        let mut p = 0.0;
        let mut count = 0usize;
        while count < 1_000_000 {
            let ch = sample_ris(16, 1, 16, &mut rng).unwrap();
            for g in 0..16 {
                p += ch.group(0, g).norm_sqr();
            }
            count += 16;
        }
        p /= count as f64;
        assert!((p - 1.0).abs() < 0.01, "variance {p}");
    }

    #[test]
    fn ris_rejects_bad_grouping() {
        let mut rng = SimRng::new(14);
        assert!(sample_ris(10, 1, 3, &mut rng).is_err());
    }

    #[test]
    fn mbm_state_count() {
        let mut rng = SimRng::new(15);
        let states = sample_mbm_states(3, 2, &mut rng).unwrap();
        assert_eq!((states.rows(), states.cols()), (8, 2));
    }
}
