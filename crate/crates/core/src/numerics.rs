//! Complex vectors, small dense matrices, Gaussian sampling, and the
//! zero-forcing precoder.
//!
//! Matrix sizes in every supported configuration are at most 8×8, so the
//! linear algebra is a hand-rolled Gaussian elimination with partial
//! pivoting — deterministic and dependency-free.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::C64;

/// Contiguous complex vector.
pub type CVec = Vec<C64>;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::invalid("matrix dimensions do not match data length"));
        }
        Ok(CMat { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    /// Row `r` as a slice.
    #[inline]
    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn herm(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.at(r, c).conj());
            }
        }
        out
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                for c in 0..rhs.cols {
                    let v = out.at(r, c) + a * rhs.at(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// `self · x` into `out` (no allocation).
    pub fn mul_vec_into(&self, x: &[C64], out: &mut [C64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for r in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            let row = self.row(r);
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            out[r] = acc;
        }
    }

    /// `self · x`.
    pub fn mul_vec(&self, x: &[C64]) -> CVec {
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// Largest entry magnitude of `self − rhs`.
    pub fn max_abs_diff(&self, rhs: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum (∞-norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.at(i, i)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `n` i.i.d. circularly-symmetric complex Gaussian samples, `CN(0, 1)`:
/// real and imaginary parts are independent `N(0, 1/2)`.
pub fn cgauss(rng: &mut SimRng, n: usize) -> Result<CVec> {
    if n == 0 {
        return Err(Error::invalid("cgauss requires n >= 1"));
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(cgauss_one(rng));
    }
    Ok(out)
}

/// One `CN(0, 1)` sample.
#[inline]
pub fn cgauss_one(rng: &mut SimRng) -> C64 {
    const HALF_SQRT: f64 = core::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = rng.gauss_pair();
    C64::new(a * HALF_SQRT, b * HALF_SQRT)
}

/// Adds complex white Gaussian noise of per-entry variance `n0` in place.
/// `n0 = 0` leaves `y` untouched (and draws nothing).
pub fn awgn_in_place(y: &mut [C64], n0: f64, rng: &mut SimRng) -> Result<()> {
    if n0 < 0.0 || !n0.is_finite() {
        return Err(Error::invalid("noise variance n0 must be finite and >= 0"));
    }
    if n0 == 0.0 {
        return Ok(());
    }
    let sigma = libm::sqrt(n0 / 2.0);
    for v in y.iter_mut() {
        let (a, b) = rng.gauss_pair();
        *v += C64::new(a * sigma, b * sigma);
    }
    Ok(())
}

/// `y + w` with `w` i.i.d. `CN(0, n0)` per entry.
pub fn awgn(y: &[C64], n0: f64, rng: &mut SimRng) -> Result<CVec> {
    let mut out = y.to_vec();
    awgn_in_place(&mut out, n0, rng)?;
    Ok(out)
}

/// Reciprocal condition number below which `HHᴴ` is treated as singular.
pub const RCOND_MIN: f64 = 1e-12;

/// Inverts a square matrix by Gaussian elimination with partial pivoting on
/// the augmented system `[A | I]`, then applies one Newton refinement step
/// `X ← X + X(I − AX)` to tighten the residual.
fn invert(a: &CMat) -> Result<CMat> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "invert requires a square matrix");
    let mut m = a.clone();
    let mut inv = CMat::identity(n);
    for col in 0..n {
        // Partial pivoting: largest magnitude on or below the diagonal.
        let mut pivot = col;
        let mut best = m.at(col, col).norm_sqr();
        for r in col + 1..n {
            let mag = m.at(r, col).norm_sqr();
            if mag > best {
                best = mag;
                pivot = r;
            }
        }
        if best == 0.0 {
            return Err(Error::SingularChannel);
        }
        if pivot != col {
            for c in 0..n {
                let (x, y) = (m.at(col, c), m.at(pivot, c));
                m.set(col, c, y);
                m.set(pivot, c, x);
                let (x, y) = (inv.at(col, c), inv.at(pivot, c));
                inv.set(col, c, y);
                inv.set(pivot, c, x);
            }
        }
        let d = m.at(col, col);
        for c in 0..n {
            m.set(col, c, m.at(col, c) / d);
            inv.set(col, c, inv.at(col, c) / d);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m.at(r, col);
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..n {
                let v = m.at(r, c) - f * m.at(col, c);
                m.set(r, c, v);
                let v = inv.at(r, c) - f * inv.at(col, c);
                inv.set(r, c, v);
            }
        }
    }
    // One refinement step: squares the inversion residual.
    let mut e = CMat::identity(n);
    let ax = a.mul(&inv);
    for r in 0..n {
        for c in 0..n {
            e.set(r, c, e.at(r, c) - ax.at(r, c));
        }
    }
    let corr = inv.mul(&e);
    for r in 0..n {
        for c in 0..n {
            inv.set(r, c, inv.at(r, c) + corr.at(r, c));
        }
    }
    if !inv.is_finite() {
        return Err(Error::SingularChannel);
    }
    Ok(inv)
}

/// Inverse of the Gram matrix `G = HHᴴ`, with a singularity guard.
pub(crate) fn gram_inverse(h: &CMat) -> Result<CMat> {
    let g = h.mul(&h.herm());
    let ginv = invert(&g)?;
    let rcond = 1.0 / (g.norm_inf() * ginv.norm_inf());
    if !(rcond >= RCOND_MIN) {
        return Err(Error::SingularChannel);
    }
    Ok(ginv)
}

/// Zero-forcing precoder `P = Hᴴ(HHᴴ)⁻¹` for an `N_R×N_T` channel with
/// `N_T ≥ N_R`, so that `H·P = I` to within `1e-9` in max-norm.
pub fn zf_precoder(h: &CMat) -> Result<CMat> {
    if h.rows() > h.cols() {
        return Err(Error::invalid("zf_precoder requires N_T >= N_R"));
    }
    Ok(h.herm().mul(&gram_inverse(h)?))
}

/// Zero-forcing link state shared by the receive-side schemes: the precoder
/// and the global gain `β = √(N_R / trace((HHᴴ)⁻¹))` that fixes the average
/// transmit power at one.
#[derive(Clone, Debug)]
pub struct ZfLink {
    pub p: CMat,
    pub beta: f64,
}

impl ZfLink {
    pub fn new(h: &CMat) -> Result<Self> {
        if h.rows() > h.cols() {
            return Err(Error::invalid("zero-forcing requires N_T >= N_R"));
        }
        let ginv = gram_inverse(h)?;
        let beta = libm::sqrt(h.rows() as f64 / ginv.trace().re);
        let p = h.herm().mul(&ginv);
        Ok(ZfLink { p, beta })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cgauss_rejects_zero_length() {
        let mut rng = SimRng::new(0);
        assert!(matches!(cgauss(&mut rng, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn cgauss_mean_near_zero() {
        // |sample mean| < 0.01 at 1e6 draws (3σ of the estimator is ~0.003).
        let mut rng = SimRng::new(11);
        let v = cgauss(&mut rng, 1_000_000).unwrap();
        let mean: C64 = v.iter().sum::<C64>() / v.len() as f64;
        assert!(mean.norm() < 0.01, "mean {mean}");
    }

    #[test]
    fn cgauss_unit_power() {
        let mut rng = SimRng::new(12);
        let v = cgauss(&mut rng, 1_000_000).unwrap();
        let p: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64;
        assert!((p - 1.0).abs() < 0.01, "E|h|^2 = {p}");
    }

    #[test]
    fn cgauss_fourth_moment() {
        // E|h|^4 = 2 for a circular Gaussian.
        let mut rng = SimRng::new(13);
        let v = cgauss(&mut rng, 1_000_000).unwrap();
        let m4: f64 = v.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum::<f64>() / v.len() as f64;
        assert!((m4 - 2.0).abs() < 0.05, "E|h|^4 = {m4}");
    }

    #[test]
    fn cgauss_deterministic() {
        let a = cgauss(&mut SimRng::new(77), 32).unwrap();
        let b = cgauss(&mut SimRng::new(77), 32).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn awgn_noiseless_is_identity() {
        let mut rng = SimRng::new(1);
        let y = vec![c(1.0, -2.0), c(0.5, 0.25)];
        let out = awgn(&y, 0.0, &mut rng).unwrap();
        assert_eq!(out, y);
    }

    #[test]
    fn awgn_rejects_negative_n0() {
        let mut rng = SimRng::new(1);
        assert!(awgn(&[c(0.0, 0.0)], -1.0, &mut rng).is_err());
    }

    #[test]
    fn awgn_unit_variance() {
        let mut rng = SimRng::new(21);
        let y = vec![c(0.0, 0.0); 1_000_000];
        let out = awgn(&y, 1.0, &mut rng).unwrap();
        let p: f64 = out.iter().map(|z| z.norm_sqr()).sum::<f64>() / out.len() as f64;
        assert!((p - 1.0).abs() < 0.01, "E|w|^2 = {p}");
    }

    #[test]
    fn awgn_per_component_variance() {
        // n0 = 4 → real-part variance 2 by circular symmetry.
        let mut rng = SimRng::new(22);
        let y = vec![c(0.0, 0.0); 1_000_000];
        let out = awgn(&y, 4.0, &mut rng).unwrap();
        let var: f64 = out.iter().map(|z| z.re * z.re).sum::<f64>() / out.len() as f64;
        assert!((var - 2.0).abs() < 0.02, "Re variance = {var}");
    }

    #[test]
    fn zf_identity_channel() {
        let h = CMat::identity(2);
        let p = zf_precoder(&h).unwrap();
        assert!(p.max_abs_diff(&CMat::identity(2)) < 1e-12);
    }

    #[test]
    fn zf_scaled_identity() {
        let mut h = CMat::identity(2);
        h.set(0, 0, c(2.0, 0.0));
        h.set(1, 1, c(2.0, 0.0));
        let p = zf_precoder(&h).unwrap();
        let mut want = CMat::identity(2);
        want.set(0, 0, c(0.5, 0.0));
        want.set(1, 1, c(0.5, 0.0));
        assert!(p.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn zf_random_square_residual() {
        let mut rng = SimRng::new(31);
        for _ in 0..100 {
            let entries = cgauss(&mut rng, 16).unwrap();
            let h = CMat::from_rows(4, 4, entries).unwrap();
            let p = match zf_precoder(&h) {
                Ok(p) => p,
                Err(Error::SingularChannel) => continue,
                Err(e) => panic!("unexpected error {e}"),
            };
            let res = h.mul(&p).max_abs_diff(&CMat::identity(4));
            assert!(res < 1e-9, "residual {res}");
        }
    }

    #[test]
    fn zf_wide_channel() {
        let mut rng = SimRng::new(32);
        let entries = cgauss(&mut rng, 2 * 5).unwrap();
        let h = CMat::from_rows(2, 5, entries).unwrap();
        let p = zf_precoder(&h).unwrap();
        assert_eq!((p.rows(), p.cols()), (5, 2));
        assert!(h.mul(&p).max_abs_diff(&CMat::identity(2)) < 1e-9);
    }

    #[test]
    fn zf_rejects_tall_channel() {
        let h = CMat::zeros(3, 2);
        assert!(matches!(zf_precoder(&h), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn zf_singular_channel_detected() {
        // Two identical rows → HH^H is rank one.
        let row = vec![c(1.0, 0.5), c(-0.25, 2.0)];
        let mut data = row.clone();
        data.extend_from_slice(&row);
        let h = CMat::from_rows(2, 2, data).unwrap();
        assert_eq!(zf_precoder(&h).unwrap_err(), Error::SingularChannel);
    }

    #[test]
    fn zflink_identity_has_unit_beta() {
        let link = ZfLink::new(&CMat::identity(4)).unwrap();
        assert!((link.beta - 1.0).abs() < 1e-12);
        assert!(link.p.max_abs_diff(&CMat::identity(4)) < 1e-12);
    }

    #[test]
    fn matrix_ops_finite_on_random_input() {
        let mut rng = SimRng::new(40);
        let h = CMat::from_rows(3, 4, cgauss(&mut rng, 12).unwrap()).unwrap();
        assert!(h.herm().is_finite());
        assert!(h.mul(&h.herm()).is_finite());
        let x = cgauss(&mut rng, 4).unwrap();
        assert!(h.mul_vec(&x).iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }
}
