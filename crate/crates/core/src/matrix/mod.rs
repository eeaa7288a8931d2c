//! Finite truncations of semi-infinite banded operators.
//!
//! Every matrix carries `exact_size`: the leading `exact_size x exact_size`
//! block equals the corresponding block of the infinite operator. Operations
//! propagate the marker; comparisons refuse to look past it.
//!
//! Products use the tight rule `exact(A B) = min(exact A, exact B) -
//! min(upper_bw A, lower_bw B)`: entry `(i, j)` of the product sums over
//! `k <= i + upper_bw(A)` and `k <= j + lower_bw(B)`, so it only touches
//! inexact entries of the factors when `min(i, j) + min(...)` reaches the edge.

pub mod factory;
pub mod verify;

use rug::ops::NegAssign;
use rug::Float;

use crate::error::{Error, Result};
use crate::real::{self, consistency_tolerance, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    nrows: usize,
    ncols: usize,
    lower_bw: usize,
    upper_bw: usize,
    exact_size: usize,
    /// Row-major band storage: row `i` holds columns `i - lower_bw ..= i + upper_bw`.
    data: Vec<Real>,
    zero: Real,
}

impl BandedMatrix {
    pub fn zeros(
        nrows: usize,
        ncols: usize,
        lower_bw: usize,
        upper_bw: usize,
        exact_size: usize,
        prec: u32,
    ) -> Self {
        let lower_bw = lower_bw.min(nrows.saturating_sub(1));
        let upper_bw = upper_bw.min(ncols.saturating_sub(1));
        let width = lower_bw + upper_bw + 1;
        BandedMatrix {
            nrows,
            ncols,
            lower_bw,
            upper_bw,
            exact_size: exact_size.min(nrows).min(ncols),
            data: vec![real::zero(prec); nrows * width],
            zero: real::zero(prec),
        }
    }

    /// `n x n` identity, exact at every size.
    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = BandedMatrix::zeros(n, n, 0, 0, n, prec);
        for i in 0..n {
            m.set(i, i, real::one(prec));
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn lower_bw(&self) -> usize {
        self.lower_bw
    }

    pub fn upper_bw(&self) -> usize {
        self.upper_bw
    }

    pub fn exact_size(&self) -> usize {
        self.exact_size
    }

    pub fn prec(&self) -> u32 {
        self.zero.prec()
    }

    pub fn with_exact_size(mut self, exact_size: usize) -> Self {
        self.exact_size = exact_size.min(self.nrows).min(self.ncols);
        self
    }

    fn width(&self) -> usize {
        self.lower_bw + self.upper_bw + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.nrows && j < self.ncols && j + self.lower_bw >= i && j <= i + self.upper_bw
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.lower_bw - i)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> &Real {
        if self.in_band(i, j) {
            &self.data[self.slot(i, j)]
        } else {
            &self.zero
        }
    }

    /// Panics when `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: Real) {
        assert!(
            self.in_band(i, j),
            "({i}, {j}) is outside the band of a {}x{} matrix with bandwidths ({}, {})",
            self.nrows,
            self.ncols,
            self.lower_bw,
            self.upper_bw
        );
        let prec = self.prec();
        let s = self.slot(i, j);
        self.data[s] = Float::with_val(prec, v);
    }

    /// Column range stored in row `i`.
    pub fn row_span(&self, i: usize) -> std::ops::Range<usize> {
        let lo = i.saturating_sub(self.lower_bw);
        let hi = (i + self.upper_bw + 1).min(self.ncols);
        lo..hi.max(lo)
    }

    /// Stored entries `(i, j, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Real)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row_span(i).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn transpose(&self) -> Self {
        let mut t = BandedMatrix::zeros(
            self.ncols,
            self.nrows,
            self.upper_bw,
            self.lower_bw,
            self.exact_size,
            self.prec(),
        );
        for (i, j, v) in self.entries() {
            t.set(j, i, v.clone());
        }
        t
    }

    pub fn mul(&self, other: &BandedMatrix) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::Internal(format!(
                "product of {}x{} and {}x{} matrices",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let prec = self.prec().max(other.prec());
        let lost = self.upper_bw.min(other.lower_bw);
        let exact = self.exact_size.min(other.exact_size).saturating_sub(lost);
        let mut out = BandedMatrix::zeros(
            self.nrows,
            other.ncols,
            self.lower_bw + other.lower_bw,
            self.upper_bw + other.upper_bw,
            exact,
            prec,
        );
        for i in 0..self.nrows {
            for j in out.row_span(i) {
                let span = self.row_span(i);
                let lo = span.start.max(j.saturating_sub(other.upper_bw));
                let hi = span.end.min(j + other.lower_bw + 1);
                let mut acc = real::zero(prec);
                for k in lo..hi {
                    acc += Float::with_val(prec, self.get(i, k) * other.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    fn combine(&self, other: &BandedMatrix, sign: i32) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::Internal("sum of matrices with different shapes".into()));
        }
        let prec = self.prec().max(other.prec());
        let mut out = BandedMatrix::zeros(
            self.nrows,
            self.ncols,
            self.lower_bw.max(other.lower_bw),
            self.upper_bw.max(other.upper_bw),
            self.exact_size.min(other.exact_size),
            prec,
        );
        for i in 0..self.nrows {
            for j in out.row_span(i) {
                let v = if sign >= 0 {
                    Float::with_val(prec, self.get(i, j) + other.get(i, j))
                } else {
                    Float::with_val(prec, self.get(i, j) - other.get(i, j))
                };
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &BandedMatrix) -> Result<Self> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &BandedMatrix) -> Result<Self> {
        self.combine(other, -1)
    }

    /// `A + alpha I`.
    pub fn add_identity(&self, alpha: &Real) -> Self {
        let mut out = self.clone();
        for i in 0..self.nrows.min(self.ncols) {
            let v = Float::with_val(self.prec(), self.get(i, i) + alpha);
            out.set(i, i, v);
        }
        out
    }

    /// `s A` for `s = +-1`.
    pub fn signed(&self, s: i32) -> Self {
        let mut out = self.clone();
        if s < 0 {
            for v in out.data.iter_mut() {
                v.neg_assign();
            }
        }
        out
    }

    /// `sigma (A - c I)`.
    pub fn shifted(&self, c: &Real, sigma: i32) -> Self {
        let neg = Float::with_val(self.prec(), -c);
        self.add_identity(&neg).signed(sigma)
    }

    /// Leading `k x k` block, keeping band structure.
    pub fn leading(&self, k: usize) -> Self {
        let k = k.min(self.nrows).min(self.ncols);
        let mut out = BandedMatrix::zeros(k, k, self.lower_bw, self.upper_bw, self.exact_size, self.prec());
        for i in 0..k {
            for j in out.row_span(i) {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    /// `max |A_ij - A_ji|` over the exact block, relative to the block scale.
    pub fn symmetry_defect(&self) -> Real {
        let e = self.exact_size;
        let prec = self.prec();
        let mut worst = real::zero(prec);
        let mut scale = real::zero(prec);
        for i in 0..e {
            for j in 0..e {
                let d = real::abs(&Float::with_val(prec, self.get(i, j) - self.get(j, i)));
                if d > worst {
                    worst = d;
                }
                let a = real::abs(self.get(i, j));
                if a > scale {
                    scale = a;
                }
            }
        }
        if scale.is_zero() {
            worst
        } else {
            worst / scale
        }
    }
}

/// Max over the leading `block x block` entries of
/// `|A_ij - B_ij| / max(|A_ij|, |B_ij|, S 2^(-prec/2))`, `S` the largest entry
/// magnitude of either block. The floor keeps structural zeros from turning
/// rounding noise into order-one relative errors.
///
/// Fails when the block reaches past either exact size.
pub fn max_rel_residual(a: &BandedMatrix, b: &BandedMatrix, block: usize) -> Result<Real> {
    if block > a.exact_size() || block > b.exact_size() {
        return Err(Error::Internal(format!(
            "residual block {block} exceeds exact sizes {} / {}",
            a.exact_size(),
            b.exact_size()
        )));
    }
    let prec = a.prec().max(b.prec());
    let mut scale = real::zero(prec);
    for i in 0..block {
        for j in 0..block {
            for v in [a.get(i, j), b.get(i, j)] {
                let m = real::abs(v);
                if m > scale {
                    scale = m;
                }
            }
        }
    }
    let floor = scale * consistency_tolerance(prec);
    let mut worst = real::zero(prec);
    for i in 0..block {
        for j in 0..block {
            let (x, y) = (a.get(i, j), b.get(i, j));
            let diff = real::abs(&Float::with_val(prec, x - y));
            if diff.is_zero() {
                continue;
            }
            let mut den = real::abs(x).max(&real::abs(y));
            if den < floor {
                den = floor.clone();
            }
            let r = diff / den;
            if r > worst {
                worst = r;
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::from_f64;
    use proptest::prelude::*;

    const PREC: u32 = 128;

    fn tri(n: usize, d: f64, o: f64) -> BandedMatrix {
        let mut m = BandedMatrix::zeros(n, n, 1, 1, n, PREC);
        for i in 0..n {
            m.set(i, i, from_f64(PREC, d + i as f64));
            if i + 1 < n {
                m.set(i, i + 1, from_f64(PREC, o));
                m.set(i + 1, i, from_f64(PREC, o));
            }
        }
        m
    }

    fn dense_mul(a: &BandedMatrix, b: &BandedMatrix, i: usize, j: usize) -> Real {
        let mut acc = real::zero(PREC);
        for k in 0..a.ncols() {
            acc += Float::with_val(PREC, a.get(i, k) * b.get(k, j));
        }
        acc
    }

    #[test]
    fn band_storage() {
        let mut m = BandedMatrix::zeros(4, 4, 1, 2, 4, PREC);
        m.set(3, 2, from_f64(PREC, 5.0));
        m.set(0, 2, from_f64(PREC, 7.0));
        assert_eq!(*m.get(3, 2), 5);
        assert_eq!(*m.get(0, 2), 7);
        assert_eq!(*m.get(3, 0), 0);
        assert!(!m.in_band(0, 3));
        assert_eq!(m.entries().count(), 3 + 4 + 3 + 2);
    }

    #[test]
    #[should_panic(expected = "outside the band")]
    fn set_outside_band_panics() {
        let mut m = BandedMatrix::zeros(3, 3, 0, 0, 3, PREC);
        m.set(0, 1, real::one(PREC));
    }

    #[test]
    fn product_exact_size_rule() {
        let a = tri(6, 1.0, 1.0);
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.exact_size(), 5);
        assert_eq!((sq.lower_bw(), sq.upper_bw()), (2, 2));
        let low = BandedMatrix::zeros(6, 6, 2, 0, 6, PREC);
        assert_eq!(low.mul(&low.transpose()).unwrap().exact_size(), 6);
        assert_eq!(low.transpose().mul(&low).unwrap().exact_size(), 4);
        let dense_upper = BandedMatrix::zeros(6, 6, 1, 5, 4, PREC);
        assert_eq!(dense_upper.mul(&dense_upper.transpose()).unwrap().exact_size(), 0);
        assert_eq!(dense_upper.transpose().mul(&dense_upper).unwrap().exact_size(), 3);
    }

    #[test]
    fn shifted_and_identity() {
        let a = tri(3, 1.0, 2.0);
        let s = a.shifted(&from_f64(PREC, 4.0), -1);
        assert_eq!(*s.get(0, 0), 3);
        assert_eq!(*s.get(0, 1), -2);
        let i = BandedMatrix::identity(3, PREC);
        assert_eq!(max_rel_residual(&a.mul(&i).unwrap(), &a, 3).unwrap(), 0);
    }

    #[test]
    fn residual_respects_exact_size() {
        let a = tri(5, 1.0, 1.0);
        let b = a.mul(&a).unwrap();
        assert!(max_rel_residual(&a, &b, 4).is_ok());
        assert!(matches!(max_rel_residual(&a, &b, 5), Err(Error::Internal(_))));
    }

    #[test]
    fn residual_floor_on_structural_zeros() {
        let a = tri(4, 10.0, 1.0);
        let mut b = a.clone();
        b.set(0, 1, from_f64(PREC, 1e-20) + 1u32);
        let r = max_rel_residual(&a, &b, 4).unwrap();
        assert!(r > from_f64(PREC, 5e-21) && r < from_f64(PREC, 2e-20));
    }

    proptest! {
        #[test]
        fn banded_product_matches_dense(
            vals in prop::collection::vec(-5.0f64..5.0, 64),
            l in 0usize..3, u in 0usize..3, l2 in 0usize..3, u2 in 0usize..3,
        ) {
            let n = 6;
            let mut a = BandedMatrix::zeros(n, n, l, u, n, PREC);
            let mut b = BandedMatrix::zeros(n, n, l2, u2, n, PREC);
            let mut it = vals.iter().cycle();
            for i in 0..n {
                for j in a.row_span(i) {
                    a.set(i, j, from_f64(PREC, *it.next().unwrap()));
                }
                for j in b.row_span(i) {
                    b.set(i, j, from_f64(PREC, *it.next().unwrap()));
                }
            }
            let p = a.mul(&b).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(p.get(i, j), &dense_mul(&a, &b, i, j));
                }
            }
            let t = a.transpose();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(t.get(i, j), a.get(j, i));
                }
            }
        }
    }
}
