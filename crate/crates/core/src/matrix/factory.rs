//! Jacobi matrices, the Cholesky-commute chain, the QR pair and the Sobolev
//! matrices `H`, `T`.
//!
//! With `sigma = +1` when `c` lies left of the support and `-1` when it lies
//! right, the chain is
//!
//! ```text
//! sigma (J  - cI) = L  L^T,    J1 = c I + sigma L^T L
//! sigma (J1 - cI) = L1 L1^T,   J2 = c I + sigma L1^T L1
//! Q = L L1^{-T},   R = (L L1)^T,   Q R = sigma (J - cI),   R Q = sigma (J2 - cI)
//! ```

use rug::ops::NegAssign;
use rug::Float;

use super::BandedMatrix;
use crate::christoffel::ChristoffelLedger;
use crate::error::{check_index, Error, Result};
use crate::real::{self, Real};
use crate::sobolev::SobolevLedger;
use crate::spectral::{RecurrenceTable, Side};

/// Symmetric tridiagonal matrix with the given diagonal and off-diagonal.
pub fn jacobi_from_coefficients(diag: &[Real], off: &[Real], exact_size: usize) -> Result<BandedMatrix> {
    let n = diag.len();
    if n == 0 || off.len() + 1 < n {
        return Err(Error::Internal("Jacobi matrix needs n diagonal and n - 1 off-diagonal entries".into()));
    }
    let mut j = BandedMatrix::zeros(n, n, 1, 1, exact_size, diag[0].prec());
    for i in 0..n {
        j.set(i, i, diag[i].clone());
        if i + 1 < n {
            j.set(i, i + 1, off[i].clone());
            j.set(i + 1, i, off[i].clone());
        }
    }
    Ok(j)
}

/// `J` with diagonal `beta_n` and off-diagonal `sqrt(gamma_{n+1})`.
pub fn build_jacobi(rec: &RecurrenceTable, size: usize) -> Result<BandedMatrix> {
    if size == 0 {
        return Err(Error::InvalidParameter("matrix size must be positive".into()));
    }
    check_index(size - 1, rec.size())?;
    let diag: Vec<Real> = (0..size).map(|k| rec.beta(k).clone()).collect();
    let off: Vec<Real> = (1..size).map(|k| real::sqrt(rec.gamma(k))).collect();
    jacobi_from_coefficients(&diag, &off, size)
}

/// Jacobi matrix of the twice-iterated family: diagonal `kappa_n`,
/// off-diagonal `sqrt(tau_{n+1})`.
pub fn iterated_jacobi(ledger: &ChristoffelLedger, size: usize) -> Result<BandedMatrix> {
    if size == 0 {
        return Err(Error::InvalidParameter("matrix size must be positive".into()));
    }
    check_index(size - 1, ledger.size())?;
    let diag: Vec<Real> = ledger.kappa[..size].to_vec();
    let off: Vec<Real> = (1..size).map(|k| real::sqrt(&ledger.tau[k])).collect();
    jacobi_from_coefficients(&diag, &off, size)
}

/// Lower bidiagonal `L` with `L L^T = sigma (J - cI)`.
pub fn cholesky_shifted(j: &BandedMatrix, c: &Real, side: Side) -> Result<BandedMatrix> {
    if j.lower_bw() > 1 || j.upper_bw() > 1 || j.nrows() != j.ncols() {
        return Err(Error::Internal("Cholesky step expects a square tridiagonal matrix".into()));
    }
    let prec = j.prec();
    let a = j.shifted(c, side.sign());
    let n = a.nrows();
    let mut l = BandedMatrix::zeros(n, n, 1, 0, j.exact_size(), prec);
    let mut prev = real::zero(prec);
    for i in 0..n {
        let mut pivot = a.get(i, i).clone();
        if i > 0 {
            let sub = Float::with_val(prec, a.get(i, i - 1) / &prev);
            pivot -= Float::with_val(prec, sub.square_ref());
            l.set(i, i - 1, sub);
        }
        if pivot <= 0 {
            return Err(Error::NotPositiveDefinite {
                index: i,
                pivot: real::to_decimal(&pivot),
            });
        }
        let d = real::sqrt(&pivot);
        l.set(i, i, d.clone());
        prev = d;
    }
    Ok(l)
}

/// Next Jacobi matrix `c I + sigma L^T L`. The last diagonal entry would need
/// a row of `L` beyond the truncation, so the exact size drops by one.
pub fn commute_cholesky(l: &BandedMatrix, c: &Real, side: Side) -> BandedMatrix {
    let prec = l.prec();
    let n = l.nrows();
    let sigma = side.sign();
    let mut j = BandedMatrix::zeros(n, n, 1, 1, l.exact_size().saturating_sub(1), prec);
    for i in 0..n {
        let mut d = real::square(l.get(i, i));
        if i + 1 < n {
            d += real::square(l.get(i + 1, i));
            let off = Float::with_val(prec, l.get(i + 1, i) * l.get(i + 1, i + 1));
            let off = if sigma < 0 { -off } else { off };
            j.set(i, i + 1, off.clone());
            j.set(i + 1, i, off);
        }
        if sigma < 0 {
            d.neg_assign();
        }
        j.set(i, i, d + c);
    }
    j
}

/// `Q = L L1^{-T}` (lower Hessenberg: one subdiagonal, dense above) and
/// `R = (L L1)^T` (upper triangular, bandwidth 2).
pub fn qr_pair(l: &BandedMatrix, l1: &BandedMatrix) -> Result<(BandedMatrix, BandedMatrix)> {
    let n = l.nrows();
    if l1.nrows() != n || l.upper_bw() != 0 || l1.upper_bw() != 0 {
        return Err(Error::Internal("qr_pair expects two lower bidiagonal factors of equal size".into()));
    }
    let prec = l.prec();
    let exact = l.exact_size().min(l1.exact_size()).saturating_sub(1);

    let r = l.mul(l1)?.transpose().with_exact_size(exact);

    // Q L1^T = L, solved column by column:
    // Q_ij = (L_ij - L1_{j,j-1} Q_{i,j-1}) / L1_jj.
    let mut q = BandedMatrix::zeros(n, n, 1, n.saturating_sub(1), exact, prec);
    for i in 0..n {
        for j in q.row_span(i) {
            let mut v = l.get(i, j).clone();
            if j > 0 && q.in_band(i, j - 1) {
                v -= Float::with_val(prec, l1.get(j, j - 1) * q.get(i, j - 1));
            }
            let d = l1.get(j, j);
            if d.is_zero() {
                return Err(Error::NumericalFailure("zero diagonal in L1".into()));
            }
            v /= d;
            q.set(i, j, v);
        }
    }
    Ok((q, r))
}

/// Pentadiagonal `H`: `H[n][n] = c_n`, `H[n-1][n] = b_n`, `H[n-2][n] = a_n`.
pub fn build_h(ledger: &SobolevLedger, size: usize) -> Result<BandedMatrix> {
    if size == 0 {
        return Err(Error::InvalidParameter("matrix size must be positive".into()));
    }
    check_index(size - 1, ledger.size())?;
    let mut h = BandedMatrix::zeros(size, size, 2, 2, size, ledger.prec());
    for n in 0..size {
        h.set(n, n, ledger.cdiag[n].clone());
        if n >= 1 {
            h.set(n - 1, n, ledger.b[n].clone());
            h.set(n, n - 1, ledger.b[n].clone());
        }
        if n >= 2 {
            h.set(n - 2, n, ledger.a[n].clone());
            h.set(n, n - 2, ledger.a[n].clone());
        }
    }
    Ok(h)
}

/// Lower triangular `T` with `T[n][k] = gamma_{k,n}`.
pub fn build_t(ledger: &SobolevLedger, size: usize) -> Result<BandedMatrix> {
    if size == 0 {
        return Err(Error::InvalidParameter("matrix size must be positive".into()));
    }
    check_index(size - 1, ledger.size())?;
    let mut t = BandedMatrix::zeros(size, size, 2, 0, size, ledger.prec());
    for n in 0..size {
        t.set(n, n, ledger.gamma_nn[n].clone());
        if n >= 1 {
            t.set(n, n - 1, ledger.gamma_n1[n].clone());
        }
        if n >= 2 {
            t.set(n, n - 2, ledger.gamma_n2[n].clone());
        }
    }
    Ok(t)
}
