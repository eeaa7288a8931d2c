//! Reproducing kernels `K_n(x, y) = sum_{k<=n} p_k(x) p_k(y)` and their partial
//! derivatives up to order (1, 1).
//!
//! Direct summation over the orthonormal family is the reference path. The
//! closed forms (Christoffel–Darboux quotient, its `y`-derivative, and the
//! confluent values at `x = y = c`) are faster and are validated against the
//! sums in the tests.
//!
//! Index convention for the `(1,1)` confluent value: the closed form
//!
//! ```text
//! [ (P_n P'''_{n+1} - P_{n+1} P'''_n) / 6 + (P'_n P''_{n+1} - P'_{n+1} P''_n) / 2 ] / ||P_n||^2
//! ```
//!
//! evaluated at `c` equals `K_n^{(1,1)}(c, c)` (the same index `n` as the
//! `(0,0)` and `(0,1)` confluent forms built from `P_n`, `P_{n+1}`). It is
//! sometimes printed with `K_{n-1}^{(1,1)}` on the left; that reading fails
//! already at `n = 1` for Laguerre `alpha = 0`, `c = -1`, where the sum gives
//! `(p_1')^2 = 1` while `K_0^{(1,1)} = 0`. `closed_form_k11_uses_index_n`
//! below pins this down against the summation oracle.

use rug::Float;

use crate::error::{check_index, Error, Result};
use crate::real::{self, Real};
use crate::spectral::{eval_jet, PolyJet, RecurrenceTable};

/// Confluent kernel values at `x = y = c`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfluents {
    pub n: usize,
    pub c: Real,
    /// `K_n(c, c)`
    pub k: Real,
    /// `K_n^{(0,1)}(c, c)`
    pub k01: Real,
    /// `K_n^{(1,0)}(c, c)`, equal to `k01` by symmetry
    pub k10: Real,
    /// `K_n^{(1,1)}(c, c)`
    pub k11: Real,
}

impl KernelConfluents {
    /// All-zero values, the convention for the empty kernel `K_{-1}`.
    pub fn empty(c: &Real) -> Self {
        let z = real::zero(c.prec());
        KernelConfluents {
            n: 0,
            c: c.clone(),
            k: z.clone(),
            k01: z.clone(),
            k10: z.clone(),
            k11: z,
        }
    }
}

/// `|x - y| > 1e-8 (1 + |x| + |y|)`: far enough apart for divided differences.
fn well_separated(x: &Real, y: &Real) -> bool {
    let prec = x.prec();
    let gap = Float::with_val(prec, x - y).abs();
    let mut scale = real::one(prec);
    scale += real::abs(x);
    scale += real::abs(y);
    scale *= 1e-8;
    gap > scale
}

fn need_successor(rec: &RecurrenceTable, n: usize) -> Result<()> {
    check_index(n + 1, rec.size())
}

/// Direct summation `sum_{k<=n} p_k(x) p_k(y)`.
pub fn kernel_sum(rec: &RecurrenceTable, n: usize, x: &Real, y: &Real) -> Result<Real> {
    let jx = rec.orthonormal_jet(n, x, 0)?;
    let jy = rec.orthonormal_jet(n, y, 0)?;
    let mut acc = real::zero(rec.prec());
    for k in 0..=n {
        acc += Float::with_val(rec.prec(), jx.value(k) * jy.value(k));
    }
    Ok(acc)
}

/// `K_n(x, y)`; Christoffel–Darboux quotient when `x` and `y` are well
/// separated, direct summation otherwise.
pub fn kernel_at(rec: &RecurrenceTable, n: usize, x: &Real, y: &Real) -> Result<Real> {
    need_successor(rec, n)?;
    if !well_separated(x, y) {
        return kernel_sum(rec, n, x, y);
    }
    let prec = rec.prec();
    let jx = eval_jet(rec, n + 1, x, 0)?;
    let jy = eval_jet(rec, n + 1, y, 0)?;
    let mut num = Float::with_val(prec, jx.value(n + 1) * jy.value(n));
    num -= Float::with_val(prec, jx.value(n) * jy.value(n + 1));
    let den = Float::with_val(prec, x - y) * rec.norm_sq(n);
    Ok(num / den)
}

/// Direct summation `sum_{k<=n} p_k(x) p_k'(c)`.
pub fn kernel_dy_sum(rec: &RecurrenceTable, n: usize, x: &Real, c: &Real) -> Result<Real> {
    let jx = rec.orthonormal_jet(n, x, 0)?;
    let jc = rec.orthonormal_jet(n, c, 1)?;
    let mut acc = real::zero(rec.prec());
    for k in 0..=n {
        acc += Float::with_val(rec.prec(), jx.value(k) * jc.derivative(k, 1));
    }
    Ok(acc)
}

/// `K_n^{(0,1)}(x, c)` by the closed two-fraction form. `x = c` is rejected:
/// use [`kernel_confluents`] there.
pub fn kernel_dy_at_c(rec: &RecurrenceTable, n: usize, x: &Real, c: &Real) -> Result<Real> {
    need_successor(rec, n)?;
    if x == c {
        return Err(Error::Domain(
            "K^(0,1)(x, c) at x = c is a confluent value; use kernel_confluents".into(),
        ));
    }
    let prec = rec.prec();
    let jx = eval_jet(rec, n + 1, x, 0)?;
    let jc = eval_jet(rec, n + 1, c, 1)?;
    let h = Float::with_val(prec, x - c);
    let mut first = Float::with_val(prec, jx.value(n + 1) * jc.value(n));
    first -= Float::with_val(prec, jx.value(n) * jc.value(n + 1));
    first /= Float::with_val(prec, h.square_ref());
    let mut second = Float::with_val(prec, jx.value(n + 1) * jc.derivative(n, 1));
    second -= Float::with_val(prec, jx.value(n) * jc.derivative(n + 1, 1));
    second /= &h;
    Ok((first + second) / rec.norm_sq(n))
}

/// `K_n^{(0,1)}(x, c)` choosing the closed form or summation by separation.
pub fn kernel_dy(rec: &RecurrenceTable, n: usize, x: &Real, c: &Real) -> Result<Real> {
    need_successor(rec, n)?;
    if well_separated(x, c) {
        kernel_dy_at_c(rec, n, x, c)
    } else {
        kernel_dy_sum(rec, n, x, c)
    }
}

/// Confluent values from closed forms; `jet_c` must hold monic values at `c`
/// through index `n + 1` with derivatives up to order 3.
pub fn confluents_from_jet(
    rec: &RecurrenceTable,
    jet_c: &PolyJet,
    n: usize,
    c: &Real,
) -> Result<KernelConfluents> {
    need_successor(rec, n)?;
    if jet_c.degree() < n + 1 || jet_c.order() < 3 {
        return Err(Error::Internal(format!(
            "jet of degree {} / order {} is too small for confluent kernels at n = {n}",
            jet_c.degree(),
            jet_c.order()
        )));
    }
    let prec = rec.prec();
    let d = |k: usize, j: usize| jet_c.derivative(k, j);
    let cross = |j0: usize, j1: usize| {
        // P_n^{(j0)} P_{n+1}^{(j1)} - P_{n+1}^{(j0)} P_n^{(j1)}
        let mut v = Float::with_val(prec, d(n, j0) * d(n + 1, j1));
        v -= Float::with_val(prec, d(n + 1, j0) * d(n, j1));
        v
    };
    let norm = rec.norm_sq(n);
    let k = cross(0, 1) / norm;
    let k01 = cross(0, 2) / 2u32 / norm;
    let k11 = (cross(0, 3) / 6u32 + cross(1, 2) / 2u32) / norm;
    Ok(KernelConfluents {
        n,
        c: c.clone(),
        k,
        k10: k01.clone(),
        k01,
        k11,
    })
}

/// `K_n(c,c)`, `K_n^{(0,1)}(c,c)`, `K_n^{(1,0)}(c,c)`, `K_n^{(1,1)}(c,c)` by the
/// confluent closed forms.
pub fn kernel_confluents(rec: &RecurrenceTable, n: usize, c: &Real) -> Result<KernelConfluents> {
    need_successor(rec, n)?;
    let jet = eval_jet(rec, n + 1, c, 3)?;
    confluents_from_jet(rec, &jet, n, c)
}

/// Confluent values by direct summation of `p_k^{(i)}(c) p_k^{(j)}(c)`.
pub fn kernel_confluents_sum(
    rec: &RecurrenceTable,
    n: usize,
    c: &Real,
) -> Result<KernelConfluents> {
    let prec = rec.prec();
    let jet = rec.orthonormal_jet(n, c, 1)?;
    let mut k = real::zero(prec);
    let mut k01 = real::zero(prec);
    let mut k11 = real::zero(prec);
    for i in 0..=n {
        let v = jet.value(i);
        let dv = jet.derivative(i, 1);
        k += Float::with_val(prec, v.square_ref());
        k01 += Float::with_val(prec, v * dv);
        k11 += Float::with_val(prec, dv.square_ref());
    }
    Ok(KernelConfluents {
        n,
        c: c.clone(),
        k,
        k10: k01.clone(),
        k01,
        k11,
    })
}
