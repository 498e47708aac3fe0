//! Antenna-based single-RF schemes: SM, single-RF GSM, QSM (detected with
//! receiver CSI only), and the receive-side schemes RSM and RQSM (zero-forcing
//! precoding with transmitter CSI).
//!
//! Bit-field conventions (most-significant field first):
//!
//! * SM: `[antenna index | symbol]`
//! * GSM: `[pattern rank | symbol]`
//! * QSM: `[I antenna | Q antenna | symbol]`
//! * RSM: `[target antenna | symbol]`
//! * RQSM: `[I target | Q target | symbol]`
//!
//! Spatial indices are natural binary; activation patterns are combinadic
//! ranks (lexicographic), with only the first `2^⌊log₂C⌋` patterns legal.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::sample_mimo;
use crate::config::{Detector, SchemeConfig};
use crate::detect::{ml_detect, HypothesisSet};
use crate::error::{Error, Result};
use crate::mapping::{
    bits_to_index, build_constellation, combination_unrank, floor_log2, index_bit_width,
    spectral_efficiency, Constellation,
};
use crate::numerics::{awgn_in_place, CMat, CVec, ZfLink};
use crate::rng::SimRng;
use crate::sim::{FrameOutcome, LinkScheme};
use crate::C64;

/// Complex amplitudes fed to the transmit antennas in one channel use.
pub type TxVector = CVec;

fn check_width(bits: &[u8], se: usize) -> Result<()> {
    if bits.len() != se {
        return Err(Error::invalid(alloc::format!(
            "frame expects {se} bits, got {}",
            bits.len()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- SM

/// Spatial modulation: one active antenna whose index carries
/// `⌊log₂N_T⌋` bits next to an `M`-ary symbol.
pub struct SmScheme {
    nt: usize,
    nr: usize,
    wa: usize,
    cons: Constellation,
    se: usize,
}

impl SmScheme {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        let &SchemeConfig::Sm { nt, nr, m, kind } = cfg else {
            return Err(Error::invalid("expected an SM configuration"));
        };
        let se = spectral_efficiency(cfg)?;
        Ok(SmScheme { nt, nr, wa: floor_log2(nt), cons: build_constellation(kind, m)?, se })
    }

    /// `x[a] = s`, all other antennas silent.
    pub fn encode(&self, bits: &[u8]) -> Result<TxVector> {
        check_width(bits, self.se)?;
        let a = bits_to_index(&bits[..self.wa]);
        let s = self.cons.map_symbol(&bits[self.wa..])?;
        let mut x = vec![C64::new(0.0, 0.0); self.nt];
        x[a] = s;
        Ok(x)
    }

    fn write_rx(&self, h: &CMat, ord: usize, out: &mut [C64]) {
        let sb = self.cons.bits_per_symbol();
        let a = ord >> sb;
        let s = self.cons.point(ord & ((1 << sb) - 1));
        for r in 0..self.nr {
            out[r] = h.at(r, a) * s;
        }
    }
}

struct SmHyp<'a> {
    sch: &'a SmScheme,
    h: &'a CMat,
}

impl HypothesisSet for SmHyp<'_> {
    fn count(&self) -> usize {
        1 << self.sch.se
    }
    fn dim(&self) -> usize {
        self.sch.nr
    }
    fn write_rx(&self, ordinal: usize, out: &mut [C64]) {
        self.sch.write_rx(self.h, ordinal, out);
    }
}

impl LinkScheme for SmScheme {
    fn bits_per_frame(&self) -> usize {
        self.se
    }

    fn run_frame(&self, rng: &mut SimRng, n0: f64) -> FrameOutcome {
        let h = sample_mimo(self.nr, self.nt, rng).expect("validated dims");
        let mut bits = vec![0u8; self.se];
        rng.fill_bits(&mut bits);
        let x = self.encode(&bits).expect("validated width");
        let mut y = h.mul_vec(&x);
        awgn_in_place(&mut y, n0, rng).expect("validated n0");
        let got = ml_detect(&y, &SmHyp { sch: self, h: &h }).expect("nonempty set");
        FrameOutcome::from_ordinals(bits_to_index(&bits), got)
    }
}

// ---------------------------------------------------------------- GSM

/// Single-RF generalized SM: `N_A` antennas radiate one shared symbol; the
/// activation pattern carries `⌊log₂C(N_T,N_A)⌋` bits. Symbol power is split
/// evenly so `‖x‖² = |s|²`.
pub struct GsmScheme {
    nt: usize,
    nr: usize,
    patterns: Vec<Vec<usize>>,
    amp: f64,
    cons: Constellation,
    se: usize,
}

impl GsmScheme {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        let &SchemeConfig::Gsm { nt, nr, na, m, kind } = cfg else {
            return Err(Error::invalid("expected a GSM configuration"));
        };
        let se = spectral_efficiency(cfg)?;
        let wp = index_bit_width(nt, na)?;
        let patterns = (0..1u128 << wp)
            .map(|rank| combination_unrank(nt, na, rank).map(|p| p.indices))
            .collect::<Result<Vec<_>>>()?;
        Ok(GsmScheme {
            nt,
            nr,
            patterns,
            amp: 1.0 / libm::sqrt(na as f64),
            cons: build_constellation(kind, m)?,
            se,
        })
    }

    /// Number of legal activation patterns (`2^⌊log₂C(N_T,N_A)⌋`).
    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn encode(&self, bits: &[u8]) -> Result<TxVector> {
        check_width(bits, self.se)?;
        let wp = self.se - self.cons.bits_per_symbol();
        let rank = bits_to_index(&bits[..wp]);
        let s = self.cons.map_symbol(&bits[wp..])? * self.amp;
        let mut x = vec![C64::new(0.0, 0.0); self.nt];
        for &t in &self.patterns[rank] {
            x[t] = s;
        }
        Ok(x)
    }

    fn write_rx(&self, h: &CMat, ord: usize, out: &mut [C64]) {
        let sb = self.cons.bits_per_symbol();
        let pattern = &self.patterns[ord >> sb];
        let s = self.cons.point(ord & ((1 << sb) - 1)) * self.amp;
        for r in 0..self.nr {
            let mut acc = C64::new(0.0, 0.0);
            for &t in pattern {
                acc += h.at(r, t);
            }
            out[r] = acc * s;
        }
    }
}

struct GsmHyp<'a> {
    sch: &'a GsmScheme,
    h: &'a CMat,
}

impl HypothesisSet for GsmHyp<'_> {
    fn count(&self) -> usize {
        1 << self.sch.se
    }
    fn dim(&self) -> usize {
        self.sch.nr
    }
    fn write_rx(&self, ordinal: usize, out: &mut [C64]) {
        self.sch.write_rx(self.h, ordinal, out);
    }
}

impl LinkScheme for GsmScheme {
    fn bits_per_frame(&self) -> usize {
        self.se
    }

    fn run_frame(&self, rng: &mut SimRng, n0: f64) -> FrameOutcome {
        let h = sample_mimo(self.nr, self.nt, rng).expect("validated dims");
        let mut bits = vec![0u8; self.se];
        rng.fill_bits(&mut bits);
        let x = self.encode(&bits).expect("validated width");
        let mut y = h.mul_vec(&x);
        awgn_in_place(&mut y, n0, rng).expect("validated n0");
        let got = ml_detect(&y, &GsmHyp { sch: self, h: &h }).expect("nonempty set");
        FrameOutcome::from_ordinals(bits_to_index(&bits), got)
    }
}

// ---------------------------------------------------------------- QSM

/// Quadrature SM: the I and Q components of one symbol leave independently
/// selected antennas (`2⌊log₂N_T⌋` spatial bits). When both selections
/// coincide the full symbol leaves a single antenna; either way
/// `‖x‖² = |s|²`.
pub struct QsmScheme {
    nt: usize,
    nr: usize,
    wa: usize,
    cons: Constellation,
    se: usize,
}

impl QsmScheme {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        let &SchemeConfig::Qsm { nt, nr, m, kind } = cfg else {
            return Err(Error::invalid("expected a QSM configuration"));
        };
        let se = spectral_efficiency(cfg)?;
        Ok(QsmScheme { nt, nr, wa: floor_log2(nt), cons: build_constellation(kind, m)?, se })
    }

    pub fn encode(&self, bits: &[u8]) -> Result<TxVector> {
        check_width(bits, self.se)?;
        let ai = bits_to_index(&bits[..self.wa]);
        let aq = bits_to_index(&bits[self.wa..2 * self.wa]);
        let s = self.cons.map_symbol(&bits[2 * self.wa..])?;
        let mut x = vec![C64::new(0.0, 0.0); self.nt];
        x[ai] += C64::new(s.re, 0.0);
        x[aq] += C64::new(0.0, s.im);
        Ok(x)
    }

    fn write_rx(&self, h: &CMat, ord: usize, out: &mut [C64]) {
        let sb = self.cons.bits_per_symbol();
        let s = self.cons.point(ord & ((1 << sb) - 1));
        let aq = (ord >> sb) & ((1 << self.wa) - 1);
        let ai = ord >> (sb + self.wa);
        for r in 0..self.nr {
            out[r] = h.at(r, ai) * s.re + h.at(r, aq) * C64::new(0.0, s.im);
        }
    }
}

struct QsmHyp<'a> {
    sch: &'a QsmScheme,
    h: &'a CMat,
}

impl HypothesisSet for QsmHyp<'_> {
    fn count(&self) -> usize {
        1 << self.sch.se
    }
    fn dim(&self) -> usize {
        self.sch.nr
    }
    fn write_rx(&self, ordinal: usize, out: &mut [C64]) {
        self.sch.write_rx(self.h, ordinal, out);
    }
}

impl LinkScheme for QsmScheme {
    fn bits_per_frame(&self) -> usize {
        self.se
    }

    fn run_frame(&self, rng: &mut SimRng, n0: f64) -> FrameOutcome {
        let h = sample_mimo(self.nr, self.nt, rng).expect("validated dims");
        let mut bits = vec![0u8; self.se];
        rng.fill_bits(&mut bits);
        let x = self.encode(&bits).expect("validated width");
        let mut y = h.mul_vec(&x);
        awgn_in_place(&mut y, n0, rng).expect("validated n0");
        let got = ml_detect(&y, &QsmHyp { sch: self, h: &h }).expect("nonempty set");
        FrameOutcome::from_ordinals(bits_to_index(&bits), got)
    }
}

// ---------------------------------------------------------------- RSM / RQSM

/// Receive-side SM: a zero-forcing precoder steers the symbol onto the
/// receive antenna named by the spatial bits, so the noiseless receive
/// vector is `β·e_r·s` with `β = √(N_R/trace((HHᴴ)⁻¹))`.
pub struct RsmScheme {
    nt: usize,
    nr: usize,
    wr: usize,
    cons: Constellation,
    se: usize,
    detector: Detector,
}

impl RsmScheme {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        let &SchemeConfig::Rsm { nt, nr, m, kind, detector } = cfg else {
            return Err(Error::invalid("expected an RSM configuration"));
        };
        let se = spectral_efficiency(cfg)?;
        Ok(RsmScheme { nt, nr, wr: floor_log2(nr), cons: build_constellation(kind, m)?, se, detector })
    }

    /// `x = β · P · e_r · s` for the current link.
    pub fn encode(&self, bits: &[u8], link: &ZfLink) -> Result<TxVector> {
        check_width(bits, self.se)?;
        let r = bits_to_index(&bits[..self.wr]);
        let s = self.cons.map_symbol(&bits[self.wr..])? * link.beta;
        let mut x = vec![C64::new(0.0, 0.0); self.nt];
        for t in 0..self.nt {
            x[t] = link.p.at(t, r) * s;
        }
        Ok(x)
    }
}

struct RsmHyp<'a> {
    sch: &'a RsmScheme,
    beta: f64,
}

impl HypothesisSet for RsmHyp<'_> {
    fn count(&self) -> usize {
        1 << self.sch.se
    }
    fn dim(&self) -> usize {
        self.sch.nr
    }
    fn write_rx(&self, ordinal: usize, out: &mut [C64]) {
        out.fill(C64::new(0.0, 0.0));
        let sb = self.sch.cons.bits_per_symbol();
        let r = ordinal >> sb;
        out[r] = self.sch.cons.point(ordinal & ((1 << sb) - 1)) * self.beta;
    }
}

/// Greedy RSM detection: target `r̂ = argmax_r |y_r|` over the legal targets,
/// symbol demapped from `y_{r̂}/β`. Returns the frame ordinal.
pub fn rsm_detect(y: &[C64], beta: f64, cons: &Constellation, wr: usize) -> usize {
    let mut r_best = 0usize;
    let mut best = -1.0f64;
    for (r, v) in y.iter().enumerate().take(1 << wr) {
        let m = v.norm_sqr();
        if m > best {
            best = m;
            r_best = r;
        }
    }
    let v = cons.nearest_label(y[r_best] / beta);
    (r_best << cons.bits_per_symbol()) | v
}

impl LinkScheme for RsmScheme {
    fn bits_per_frame(&self) -> usize {
        self.se
    }

    fn run_frame(&self, rng: &mut SimRng, n0: f64) -> FrameOutcome {
        let mut redraws = 0u32;
        let (h, link) = loop {
            let h = sample_mimo(self.nr, self.nt, rng).expect("validated dims");
            match ZfLink::new(&h) {
                Ok(link) => break (h, link),
                Err(Error::SingularChannel) => redraws += 1,
                Err(e) => unreachable!("unexpected precoder error: {e}"),
            }
        };
        let mut bits = vec![0u8; self.se];
        rng.fill_bits(&mut bits);
        let x = self.encode(&bits, &link).expect("validated width");
        let mut y = h.mul_vec(&x);
        awgn_in_place(&mut y, n0, rng).expect("validated n0");
        let got = match self.detector {
            Detector::Ml => {
                ml_detect(&y, &RsmHyp { sch: self, beta: link.beta }).expect("nonempty set")
            }
            Detector::Greedy => rsm_detect(&y, link.beta, &self.cons, self.wr),
        };
        FrameOutcome::from_ordinals(bits_to_index(&bits), got).with_redraws(redraws)
    }
}

/// Receive-side QSM: the I and Q parts of one symbol are beamformed onto
/// independently selected receive antennas.
pub struct RqsmScheme {
    nt: usize,
    nr: usize,
    wr: usize,
    cons: Constellation,
    se: usize,
    detector: Detector,
}

impl RqsmScheme {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        let &SchemeConfig::Rqsm { nt, nr, m, kind, detector } = cfg else {
            return Err(Error::invalid("expected an RQSM configuration"));
        };
        let se = spectral_efficiency(cfg)?;
        Ok(RqsmScheme { nt, nr, wr: floor_log2(nr), cons: build_constellation(kind, m)?, se, detector })
    }

    /// `x = β · P · (e_{rI}·Re(s) + j·e_{rQ}·Im(s))`.
    pub fn encode(&self, bits: &[u8], link: &ZfLink) -> Result<TxVector> {
        check_width(bits, self.se)?;
        let ri = bits_to_index(&bits[..self.wr]);
        let rq = bits_to_index(&bits[self.wr..2 * self.wr]);
        let s = self.cons.map_symbol(&bits[2 * self.wr..])?;
        let si = C64::new(s.re * link.beta, 0.0);
        let sq = C64::new(0.0, s.im * link.beta);
        let mut x = vec![C64::new(0.0, 0.0); self.nt];
        for t in 0..self.nt {
            x[t] = link.p.at(t, ri) * si + link.p.at(t, rq) * sq;
        }
        Ok(x)
    }
}

struct RqsmHyp<'a> {
    sch: &'a RqsmScheme,
    beta: f64,
}

impl HypothesisSet for RqsmHyp<'_> {
    fn count(&self) -> usize {
        1 << self.sch.se
    }
    fn dim(&self) -> usize {
        self.sch.nr
    }
    fn write_rx(&self, ordinal: usize, out: &mut [C64]) {
        out.fill(C64::new(0.0, 0.0));
        let sb = self.sch.cons.bits_per_symbol();
        let wr = self.sch.wr;
        let s = self.sch.cons.point(ordinal & ((1 << sb) - 1));
        let rq = (ordinal >> sb) & ((1 << wr) - 1);
        let ri = ordinal >> (sb + wr);
        out[ri] += C64::new(s.re * self.beta, 0.0);
        out[rq] += C64::new(0.0, s.im * self.beta);
    }
}

/// Greedy RQSM detection: `r̂_I = argmax_r |Re(y_r)|`, `r̂_Q = argmax_r
/// |Im(y_r)|`, then the symbol is the nearest point to
/// `Re(y_{r̂I})/β + j·Im(y_{r̂Q})/β`. Returns the frame ordinal.
pub fn rqsm_detect(y: &[C64], beta: f64, cons: &Constellation, wr: usize) -> usize {
    let legal = 1usize << wr;
    let (mut ri, mut rq) = (0usize, 0usize);
    let (mut bi, mut bq) = (-1.0f64, -1.0f64);
    for (r, v) in y.iter().enumerate().take(legal) {
        if v.re.abs() > bi {
            bi = v.re.abs();
            ri = r;
        }
        if v.im.abs() > bq {
            bq = v.im.abs();
            rq = r;
        }
    }
    let v = cons.nearest_label(C64::new(y[ri].re / beta, y[rq].im / beta));
    let sb = cons.bits_per_symbol();
    (ri << (wr + sb)) | (rq << sb) | v
}

impl LinkScheme for RqsmScheme {
    fn bits_per_frame(&self) -> usize {
        self.se
    }

    fn run_frame(&self, rng: &mut SimRng, n0: f64) -> FrameOutcome {
        let mut redraws = 0u32;
        let (h, link) = loop {
            let h = sample_mimo(self.nr, self.nt, rng).expect("validated dims");
            match ZfLink::new(&h) {
                Ok(link) => break (h, link),
                Err(Error::SingularChannel) => redraws += 1,
                Err(e) => unreachable!("unexpected precoder error: {e}"),
            }
        };
        let mut bits = vec![0u8; self.se];
        rng.fill_bits(&mut bits);
        let x = self.encode(&bits, &link).expect("validated width");
        let mut y = h.mul_vec(&x);
        awgn_in_place(&mut y, n0, rng).expect("validated n0");
        let got = match self.detector {
            Detector::Ml => {
                ml_detect(&y, &RqsmHyp { sch: self, beta: link.beta }).expect("nonempty set")
            }
            Detector::Greedy => rqsm_detect(&y, link.beta, &self.cons, self.wr),
        };
        FrameOutcome::from_ordinals(bits_to_index(&bits), got).with_redraws(redraws)
    }
}
