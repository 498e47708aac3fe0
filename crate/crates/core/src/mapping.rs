//! Bit-level codecs: Gray-labeled constellations, the combinadic
//! bits↔activation-pattern map, and the per-scheme spectral efficiency.

use alloc::vec;
use alloc::vec::Vec;

use crate::config::{ConstellationKind, SchemeConfig};
use crate::error::{Error, Result};
use crate::C64;

/// Binary-reflected Gray code of `v`.
#[inline]
pub fn gray(v: usize) -> usize {
    v ^ (v >> 1)
}

/// `⌊log₂ x⌋` for `x ≥ 1`.
#[inline]
pub fn floor_log2(x: usize) -> usize {
    debug_assert!(x >= 1);
    (usize::BITS - 1 - x.leading_zeros()) as usize
}

/// `log₂ m` when `m` is a power of two `≥ 2`, else an error.
pub fn log2_exact(m: usize) -> Result<usize> {
    if m >= 2 && m.is_power_of_two() {
        Ok(floor_log2(m))
    } else {
        Err(Error::invalid("order must be a power of two >= 2"))
    }
}

/// Interprets `bits` (values 0/1, most-significant first) as an integer.
#[inline]
pub fn bits_to_index(bits: &[u8]) -> usize {
    let mut v = 0usize;
    for &b in bits {
        debug_assert!(b <= 1);
        v = (v << 1) | b as usize;
    }
    v
}

/// Writes `v` into `out` as bits, most-significant first.
#[inline]
pub fn index_to_bits(v: usize, out: &mut [u8]) {
    debug_assert!(out.len() == usize::BITS as usize || v < (1usize << out.len()));
    let width = out.len();
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = ((v >> (width - 1 - i)) & 1) as u8;
    }
}

/// Binomial coefficient, exact (the multiply-divide loop keeps every
/// intermediate value integral).
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c * (n - k + i) as u128 / i as u128;
    }
    c
}

/// A set of `K` active entities out of `N` (antennas, elements, or groups).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActivationPattern {
    /// Total number of entities.
    pub n: usize,
    /// Strictly increasing active indices, all `< n`.
    pub indices: Vec<usize>,
}

impl ActivationPattern {
    fn check(&self) -> Result<()> {
        let mut prev: Option<usize> = None;
        for &i in &self.indices {
            if i >= self.n {
                return Err(Error::invalid("activation index out of range"));
            }
            if let Some(p) = prev {
                if i <= p {
                    return Err(Error::invalid("activation indices must strictly increase"));
                }
            }
            prev = Some(i);
        }
        Ok(())
    }
}

/// The `k`-th `K`-combination of `{0..N−1}` in lexicographic order.
pub fn combination_unrank(n: usize, k: usize, rank: u128) -> Result<ActivationPattern> {
    if k > n {
        return Err(Error::invalid("combination_unrank requires K <= N"));
    }
    if rank >= binomial(n, k) {
        return Err(Error::OutOfRange(alloc::format!(
            "rank {rank} >= C({n},{k}) = {}",
            binomial(n, k)
        )));
    }
    let mut indices = Vec::with_capacity(k);
    let mut rank = rank;
    let mut c = 0usize; // next candidate entity
    for slot in 0..k {
        loop {
            // combinations that fix entity c at this slot
            let count = binomial(n - c - 1, k - slot - 1);
            if rank < count {
                indices.push(c);
                c += 1;
                break;
            }
            rank -= count;
            c += 1;
        }
    }
    Ok(ActivationPattern { n, indices })
}

/// Lexicographic rank of a pattern; exact inverse of [`combination_unrank`].
pub fn combination_rank(p: &ActivationPattern) -> Result<u128> {
    p.check()?;
    let (n, k) = (p.n, p.indices.len());
    let mut rank: u128 = 0;
    let mut next = 0usize;
    for (slot, &idx) in p.indices.iter().enumerate() {
        for c in next..idx {
            rank += binomial(n - c - 1, k - slot - 1);
        }
        next = idx + 1;
    }
    Ok(rank)
}

/// Number of index bits carried by choosing `K` of `N` entities:
/// `⌊log₂ C(N,K)⌋` (which is `⌊log₂ N⌋` when `K = 1`). Only patterns with
/// rank below `2^width` are ever used.
pub fn index_bit_width(n: usize, k: usize) -> Result<usize> {
    if k == 0 || k > n {
        return Err(Error::invalid("index_bit_width requires 1 <= K <= N"));
    }
    let c = binomial(n, k);
    Ok((128 - 1 - c.leading_zeros()) as usize)
}

/// A unit-average-energy constellation with Gray bit labels.
///
/// `points[v]` is the point whose label bits encode the integer `v`
/// (most-significant first), so mapping a bit group is a single table
/// lookup and geometric neighbors differ in exactly one label bit.
#[derive(Clone, Debug)]
pub struct Constellation {
    kind: ConstellationKind,
    m: usize,
    bits: usize,
    points: Vec<C64>,
}

impl Constellation {
    #[inline]
    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    /// Point for label value `v`.
    #[inline]
    pub fn point(&self, v: usize) -> C64 {
        self.points[v]
    }

    #[inline]
    pub fn points(&self) -> &[C64] {
        &self.points
    }

    /// Maps `log₂M` bits to a point.
    pub fn map_symbol(&self, bits: &[u8]) -> Result<C64> {
        if bits.len() != self.bits {
            return Err(Error::invalid("symbol bit group has the wrong width"));
        }
        Ok(self.points[bits_to_index(bits)])
    }

    /// Label value of the Euclidean-nearest point (ties → lowest label).
    pub fn nearest_label(&self, z: C64) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (v, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = v;
            }
        }
        best
    }

    /// Bits of the Euclidean-nearest point.
    pub fn demap_symbol(&self, z: C64) -> Vec<u8> {
        let mut out = vec![0u8; self.bits];
        index_to_bits(self.nearest_label(z), &mut out);
        out
    }
}

/// Builds the Gray-labeled, unit-average-energy constellation of the given
/// kind and order.
///
/// * PSK: points `e^{j2πp/M}`, ring-Gray labels.
/// * QAM: square grid `{±1, ±3, ...}²` scaled to unit mean energy, per-axis
///   Gray labels (requires a square order: 4, 16, 64, ...).
/// * PAM: real levels `{±1, ±3, ...}` scaled to unit mean energy.
pub fn build_constellation(kind: ConstellationKind, m: usize) -> Result<Constellation> {
    let bits = log2_exact(m)?;
    let mut points = vec![C64::new(0.0, 0.0); m];
    match kind {
        ConstellationKind::Psk => {
            for p in 0..m {
                let ang = core::f64::consts::TAU * p as f64 / m as f64;
                points[gray(p)] = C64::new(libm::cos(ang), libm::sin(ang));
            }
        }
        ConstellationKind::Qam => {
            if bits % 2 != 0 {
                return Err(Error::invalid("QAM order must be square (4, 16, 64, ...)"));
            }
            let half = bits / 2;
            let side = 1usize << half;
            // mean energy of the integer grid: 2·(side² − 1)/3
            let scale = 1.0 / libm::sqrt(2.0 * ((side * side - 1) as f64) / 3.0);
            for i in 0..side {
                let li = (2 * i) as f64 - (side - 1) as f64;
                for q in 0..side {
                    let lq = (2 * q) as f64 - (side - 1) as f64;
                    points[(gray(i) << half) | gray(q)] = C64::new(li * scale, lq * scale);
                }
            }
        }
        ConstellationKind::Pam => {
            let scale = 1.0 / libm::sqrt(((m * m - 1) as f64) / 3.0);
            for i in 0..m {
                let l = (2 * i) as f64 - (m - 1) as f64;
                points[gray(i)] = C64::new(l * scale, 0.0);
            }
        }
    }
    Ok(Constellation { kind, m, bits, points })
}

/// Exact bits per channel use of a valid scheme configuration.
pub fn spectral_efficiency(cfg: &SchemeConfig) -> Result<usize> {
    cfg.validate()?;
    Ok(match *cfg {
        SchemeConfig::Sm { nt, m, .. } => floor_log2(nt) + log2_exact(m)?,
        SchemeConfig::Gsm { nt, na, m, .. } => index_bit_width(nt, na)? + log2_exact(m)?,
        SchemeConfig::Qsm { nt, m, .. } => 2 * floor_log2(nt) + log2_exact(m)?,
        SchemeConfig::Rsm { nr, m, .. } => floor_log2(nr) + log2_exact(m)?,
        SchemeConfig::Rqsm { nr, m, .. } => 2 * floor_log2(nr) + log2_exact(m)?,
        SchemeConfig::Mbm { mirrors, m, .. } => mirrors + log2_exact(m)?,
        SchemeConfig::RisMimo { ng, m, .. } => ng * log2_exact(m)?,
        SchemeConfig::RisGsm { ng, na, m, .. } | SchemeConfig::RisQsm { ng, na, m, .. } => {
            index_bit_width(ng, na)? + log2_exact(m)?
        }
        SchemeConfig::RisRsm { nr, symbol, .. } => {
            floor_log2(nr) + symbol.map_or(Ok(0), |(_, m)| log2_exact(m))?
        }
        SchemeConfig::RisRqsm { nr, pam_order, .. } => match pam_order {
            None => 2 * (1 + floor_log2(nr)),
            Some(m) => 2 * floor_log2(nr) + log2_exact(m)? + 1,
        },
    })
}
