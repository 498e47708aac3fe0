//! Seeded Monte Carlo BER estimation over SNR sweeps.
//!
//! Every frame sees an independent channel realization (block length 1).
//! Work is split into fixed-size frame chunks; chunk `c` of SNR-grid index
//! `i` always runs on the RNG stream `(i << 32) | c` of the master seed, and
//! the adaptive stop rule is evaluated at chunk boundaries in chunk order.
//! Results are therefore byte-identical for a given spec no matter how many
//! workers execute the chunks, and no matter in which order they finish.

use alloc::boxed::Box;
#[cfg(feature = "std")]
use alloc::vec;
use alloc::vec::Vec;

use crate::antenna::{GsmScheme, QsmScheme, RqsmScheme, RsmScheme, SmScheme};
use crate::channel::snr_to_n0;
use crate::config::SchemeConfig;
use crate::error::{Error, Result};
use crate::ris::{
    MbmScheme, RisGsmScheme, RisMimoScheme, RisQsmScheme, RisRqsmScheme, RisRsmScheme,
};
use crate::rng::SimRng;

/// Frames per deterministic work unit. Part of the reproducibility contract:
/// changing it changes which RNG stream simulates which frame.
pub const DEFAULT_CHUNK_FRAMES: u64 = 10_000;

/// Outcome of one simulated frame.
#[derive(Clone, Copy, Debug, Default)]
pub struct FrameOutcome {
    pub bit_errors: u32,
    /// Channel draws discarded by a numerical guard (singular zero-forcing
    /// inversions) before this frame ran.
    pub redraws: u32,
}

impl FrameOutcome {
    /// Bit errors are the Hamming distance between the sent and detected
    /// frame ordinals.
    pub fn from_ordinals(sent: usize, detected: usize) -> Self {
        FrameOutcome { bit_errors: (sent ^ detected).count_ones(), redraws: 0 }
    }

    pub fn with_redraws(mut self, redraws: u32) -> Self {
        self.redraws = redraws;
        self
    }
}

/// One scheme's end-to-end link behaviour: draw a channel and payload,
/// transmit, detect, count bit errors.
pub trait LinkScheme: Send + Sync {
    /// Bits consumed per channel use (= the scheme's spectral efficiency).
    fn bits_per_frame(&self) -> usize;

    /// Simulates a single channel use at noise level `n0`.
    fn run_frame(&self, rng: &mut SimRng, n0: f64) -> FrameOutcome;
}

/// Instantiates the link for any of the eleven scheme configurations.
pub fn build_scheme(cfg: &SchemeConfig) -> Result<Box<dyn LinkScheme>> {
    cfg.validate()?;
    Ok(match cfg {
        SchemeConfig::Sm { .. } => Box::new(SmScheme::new(cfg)?),
        SchemeConfig::Gsm { .. } => Box::new(GsmScheme::new(cfg)?),
        SchemeConfig::Qsm { .. } => Box::new(QsmScheme::new(cfg)?),
        SchemeConfig::Rsm { .. } => Box::new(RsmScheme::new(cfg)?),
        SchemeConfig::Rqsm { .. } => Box::new(RqsmScheme::new(cfg)?),
        SchemeConfig::Mbm { .. } => Box::new(MbmScheme::new(cfg)?),
        SchemeConfig::RisMimo { .. } => Box::new(RisMimoScheme::new(cfg)?),
        SchemeConfig::RisGsm { .. } => Box::new(RisGsmScheme::new(cfg)?),
        SchemeConfig::RisQsm { .. } => Box::new(RisQsmScheme::new(cfg)?),
        SchemeConfig::RisRsm { .. } => Box::new(RisRsmScheme::new(cfg)?),
        SchemeConfig::RisRqsm { .. } => Box::new(RisRqsmScheme::new(cfg)?),
    })
}

/// Adaptive stop rule, checked at chunk boundaries: a point is done once it
/// has seen `min_errors` bit errors or `max_bits` simulated bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    /// 200 bit errors or 2×10⁶ bits, whichever comes first (≈10% relative
    /// accuracy near BER 10⁻³ at minutes-scale runtime).
    fn default() -> Self {
        StopRule { min_errors: 200, max_bits: 2_000_000 }
    }
}

/// A full sweep description: scheme, SNR grid, stop rule, master seed.
#[derive(Clone, Debug)]
pub struct SimSpec {
    pub scheme: SchemeConfig,
    /// Es/N0 grid in dB; must be strictly increasing.
    pub snr_db: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    pub chunk_frames: u64,
}

impl SimSpec {
    pub fn new(scheme: SchemeConfig, snr_db: Vec<f64>, seed: u64) -> Self {
        SimSpec { scheme, snr_db, stop: StopRule::default(), seed, chunk_frames: DEFAULT_CHUNK_FRAMES }
    }

    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        if self.snr_db.is_empty() {
            return Err(Error::invalid("SNR grid must be non-empty"));
        }
        if self.snr_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("SNR grid must be finite"));
        }
        if self.snr_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("SNR grid must be strictly increasing"));
        }
        if self.stop.min_errors == 0 {
            return Err(Error::invalid("stop rule needs min_errors >= 1"));
        }
        if self.stop.max_bits == 0 {
            return Err(Error::invalid("stop rule needs max_bits >= 1"));
        }
        if self.chunk_frames == 0 {
            return Err(Error::invalid("chunk size must be >= 1 frame"));
        }
        Ok(())
    }
}

/// One estimated BER point. `ber()` is `errors/bits`; `bits` is exactly
/// `frames × bits_per_frame`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub frames: u64,
    /// Singular-channel redraws (numerical guard events, not channel uses;
    /// excluded from the BER statistics).
    pub redraws: u64,
    pub seed: u64,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        self.errors as f64 / self.bits as f64
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct ChunkStats {
    errors: u64,
    redraws: u64,
}

fn run_chunk(
    scheme: &dyn LinkScheme,
    spec: &SimSpec,
    snr_idx: u32,
    chunk_idx: u32,
    n0: f64,
) -> ChunkStats {
    let mut rng = SimRng::for_chunk(spec.seed, snr_idx, chunk_idx);
    let mut stats = ChunkStats::default();
    for _ in 0..spec.chunk_frames {
        let out = scheme.run_frame(&mut rng, n0);
        stats.errors += out.bit_errors as u64;
        stats.redraws += out.redraws as u64;
    }
    stats
}

struct PointAccumulator {
    se: u64,
    stop: StopRule,
    frames: u64,
    errors: u64,
    redraws: u64,
}

impl PointAccumulator {
    fn new(se: u64, stop: StopRule) -> Self {
        PointAccumulator { se, stop, frames: 0, errors: 0, redraws: 0 }
    }

    /// Folds one chunk in; returns `true` when the stop rule fires.
    fn push(&mut self, chunk_frames: u64, stats: ChunkStats) -> bool {
        self.frames += chunk_frames;
        self.errors += stats.errors;
        self.redraws += stats.redraws;
        self.errors >= self.stop.min_errors || self.frames * self.se >= self.stop.max_bits
    }

    fn finish(self, snr_db: f64, seed: u64) -> BerPoint {
        BerPoint {
            snr_db,
            bits: self.frames * self.se,
            errors: self.errors,
            frames: self.frames,
            redraws: self.redraws,
            seed,
        }
    }
}

/// Simulates one SNR grid point sequentially.
pub fn run_point(spec: &SimSpec, snr_idx: usize) -> Result<BerPoint> {
    spec.validate()?;
    let scheme = build_scheme(&spec.scheme)?;
    Ok(run_point_on(&*scheme, spec, snr_idx)?)
}

fn run_point_on(scheme: &dyn LinkScheme, spec: &SimSpec, snr_idx: usize) -> Result<BerPoint> {
    let snr_db = *spec
        .snr_db
        .get(snr_idx)
        .ok_or_else(|| Error::OutOfRange(alloc::format!("SNR index {snr_idx}")))?;
    let n0 = snr_to_n0(snr_db);
    let mut acc = PointAccumulator::new(scheme.bits_per_frame() as u64, spec.stop);
    let mut chunk_idx = 0u32;
    loop {
        let stats = run_chunk(scheme, spec, snr_idx as u32, chunk_idx, n0);
        if acc.push(spec.chunk_frames, stats) {
            return Ok(acc.finish(snr_db, spec.seed));
        }
        chunk_idx += 1;
    }
}

/// Simulates the whole grid sequentially, in grid order.
pub fn run_sweep(spec: &SimSpec) -> Result<Vec<BerPoint>> {
    spec.validate()?;
    let scheme = build_scheme(&spec.scheme)?;
    (0..spec.snr_db.len())
        .map(|i| {
            run_point_on(&*scheme, spec, i)
                .map_err(|e| Error::invalid(alloc::format!("at {} dB: {e}", spec.snr_db[i])))
        })
        .collect()
}

/// Simulates one grid point on `workers` threads. Chunks run speculatively
/// in waves of `workers`, then fold in chunk order with the same stop checks
/// as the sequential path, so the result is identical to `run_point` for
/// every worker count.
#[cfg(feature = "std")]
pub fn run_point_parallel(spec: &SimSpec, snr_idx: usize, workers: usize) -> Result<BerPoint> {
    spec.validate()?;
    if workers == 0 {
        return Err(Error::invalid("worker count must be >= 1"));
    }
    let scheme = build_scheme(&spec.scheme)?;
    run_point_parallel_on(&*scheme, spec, snr_idx, workers)
}

#[cfg(feature = "std")]
fn run_point_parallel_on(
    scheme: &dyn LinkScheme,
    spec: &SimSpec,
    snr_idx: usize,
    workers: usize,
) -> Result<BerPoint> {
    let snr_db = *spec
        .snr_db
        .get(snr_idx)
        .ok_or_else(|| Error::OutOfRange(alloc::format!("SNR index {snr_idx}")))?;
    let n0 = snr_to_n0(snr_db);
    let mut acc = PointAccumulator::new(scheme.bits_per_frame() as u64, spec.stop);
    let mut next_chunk = 0u32;
    loop {
        let mut wave = vec![ChunkStats::default(); workers];
        if workers == 1 {
            wave[0] = run_chunk(scheme, spec, snr_idx as u32, next_chunk, n0);
        } else {
            std::thread::scope(|scope| {
                for (k, slot) in wave.iter_mut().enumerate() {
                    let chunk = next_chunk + k as u32;
                    scope.spawn(move || {
                        *slot = run_chunk(scheme, spec, snr_idx as u32, chunk, n0);
                    });
                }
            });
        }
        // Fold in chunk order; chunks after the stopping one are discarded,
        // which is what makes the speculative schedule reproducible.
        for stats in wave {
            if acc.push(spec.chunk_frames, stats) {
                return Ok(acc.finish(snr_db, spec.seed));
            }
        }
        next_chunk += workers as u32;
    }
}

/// Parallel sweep: grid points in order, chunks of each point spread over
/// `workers` threads.
#[cfg(feature = "std")]
pub fn run_sweep_parallel(spec: &SimSpec, workers: usize) -> Result<Vec<BerPoint>> {
    spec.validate()?;
    if workers == 0 {
        return Err(Error::invalid("worker count must be >= 1"));
    }
    let scheme = build_scheme(&spec.scheme)?;
    (0..spec.snr_db.len())
        .map(|i| {
            run_point_parallel_on(&*scheme, spec, i, workers)
                .map_err(|e| Error::invalid(alloc::format!("at {} dB: {e}", spec.snr_db[i])))
        })
        .collect()
}

/// SNR (dB) at which a measured curve crosses `target_ber`, by log-linear
/// interpolation over the first bracketing grid interval.
fn crossing(curve: &[BerPoint], target: f64) -> Result<f64> {
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::invalid("target BER must be positive and finite"));
    }
    for w in curve.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let (a, b) = (lo.ber(), hi.ber());
        if a >= target && target >= b && b > 0.0 {
            if a == b {
                return Ok(lo.snr_db);
            }
            let t = (libm::log10(target) - libm::log10(a)) / (libm::log10(b) - libm::log10(a));
            return Ok(lo.snr_db + t * (hi.snr_db - lo.snr_db));
        }
    }
    Err(Error::NotBracketed(alloc::format!("no crossing of BER {target:e}")))
}

/// Horizontal SNR gain of curve `a` over curve `b` at `target_ber`:
/// positive when `a` reaches the target BER at a lower SNR than `b`.
pub fn gain_at_ber(curve_a: &[BerPoint], curve_b: &[BerPoint], target_ber: f64) -> Result<f64> {
    Ok(crossing(curve_b, target_ber)? - crossing(curve_a, target_ber)?)
}
