//! Residuals of the factorization identities tying `H`, `T`, the Jacobi chain
//! and the QR pair together. Every residual is taken on the leading block
//! that is exact for both sides.

use serde::Serialize;

use super::{max_rel_residual, BandedMatrix};
use crate::error::{Error, Result};
use crate::real::{self, Real};
use crate::spectral::Side;

/// All matrices of one build.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    pub c: Real,
    pub side: Side,
    pub j: BandedMatrix,
    pub l: BandedMatrix,
    pub j1: BandedMatrix,
    pub l1: BandedMatrix,
    pub j2: BandedMatrix,
    /// `J2` assembled from the twice-iterated recurrence coefficients.
    pub j2_ledger: BandedMatrix,
    pub q: BandedMatrix,
    pub r: BandedMatrix,
    pub t: BandedMatrix,
    pub h: BandedMatrix,
}

impl MatrixSet {
    /// `(J2 - cI)^2`.
    pub fn j2_shift_squared(&self) -> Result<BandedMatrix> {
        let s = self.j2.shifted(&self.c, 1);
        s.mul(&s)
    }

    /// `(J - cI)^2`.
    pub fn j_shift_squared(&self) -> Result<BandedMatrix> {
        let s = self.j.shifted(&self.c, 1);
        s.mul(&s)
    }

    /// Named matrices in a fixed order, for serialization.
    pub fn named(&self) -> Vec<(&'static str, &BandedMatrix)> {
        vec![
            ("J", &self.j),
            ("L", &self.l),
            ("J1", &self.j1),
            ("L1", &self.l1),
            ("J2", &self.j2),
            ("Q", &self.q),
            ("R", &self.r),
            ("T", &self.t),
            ("H", &self.h),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    /// Side length of the compared leading block.
    pub block: usize,
    #[serde(serialize_with = "ser_real")]
    pub value: Real,
    /// Part of the pass/fail verdict, or a diagnostic only.
    pub gated: bool,
}

fn ser_real<S: serde::Serializer>(v: &Real, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&real::to_decimal(v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub size: usize,
    pub residuals: Vec<Residual>,
    /// `max |(Q_e Q_e^T - I)_ij|` on the leading 5x5 block, `Q_e` the exact
    /// columns of `Q`. Diagnostic: truncation keeps it away from zero.
    #[serde(serialize_with = "ser_real")]
    pub qqt_distance: Real,
}

impl ResidualReport {
    pub fn get(&self, name: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.name == name)
    }

    /// Largest gated residual.
    pub fn max_gated(&self) -> Real {
        let mut worst = real::zero(self.qqt_distance.prec());
        for r in self.residuals.iter().filter(|r| r.gated) {
            if r.value > worst {
                worst = r.value.clone();
            }
        }
        worst
    }

    pub fn passes(&self, tolerance: &Real) -> bool {
        self.residuals.iter().filter(|r| r.gated).all(|r| r.value <= *tolerance)
    }
}

pub const PROP_H_TTT: &str = "H = T T^T";
pub const PROP_HT: &str = "H T = T (J2 - cI)^2";
pub const PROP_QR: &str = "Q R = J - cI";
pub const PROP_RQ: &str = "R Q = J2 - cI";
pub const PROP_J2SQ: &str = "(J2 - cI)^2 = R R^T";
pub const PROP_JSQ: &str = "(J - cI)^2 = R^T R";
pub const PROP_RRT_TTT: &str = "R R^T = T^T T";
pub const DIAG_QTQ: &str = "Q^T Q = I";
pub const DIAG_CHOL: &str = "L L^T = J - cI";
pub const DIAG_CHOL1: &str = "L1 L1^T = J1 - cI";
pub const DIAG_J2: &str = "J2 (chain) = J2 (recurrence)";

/// Compares `a` and `b` on `min(block, exact a, exact b)`.
fn compare(name: &str, a: &BandedMatrix, b: &BandedMatrix, block: usize, gated: bool) -> Result<Residual> {
    let k = block.min(a.exact_size()).min(b.exact_size());
    if k == 0 {
        return Err(Error::Internal(format!("{name}: no exact block to compare")));
    }
    Ok(Residual {
        name: name.to_string(),
        block: k,
        value: max_rel_residual(a, b, k)?,
        gated,
    })
}

/// Max-entry distance of the leading `k x k` block of `Q_e Q_e^T` from the
/// identity, `Q_e` the exact columns of `Q`.
pub fn qqt_leading_distance(q: &BandedMatrix, k: usize) -> Result<Real> {
    let e = q.exact_size();
    if k > e {
        return Err(Error::Internal(format!("QQ^T block {k} exceeds exact size {e}")));
    }
    let prec = q.prec();
    let mut worst = real::zero(prec);
    for i in 0..k {
        for j in 0..k {
            let mut acc = real::zero(prec);
            for col in 0..e {
                acc += rug::Float::with_val(prec, q.get(i, col) * q.get(j, col));
            }
            if i == j {
                acc -= 1u32;
            }
            let d = real::abs(&acc);
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(worst)
}

/// All identity residuals on leading blocks of side at most `block`.
pub fn verify_propositions(m: &MatrixSet, block: usize) -> Result<ResidualReport> {
    let sigma = m.side.sign();
    let c = &m.c;
    let t_tt = m.t.mul(&m.t.transpose())?;
    let j2sq = m.j2_shift_squared()?;
    let jsq = m.j_shift_squared()?;
    let rrt = m.r.mul(&m.r.transpose())?;
    let rtr = m.r.transpose().mul(&m.r)?;
    let ttt = m.t.transpose().mul(&m.t)?;
    let qtq = m.q.transpose().mul(&m.q)?;
    let ident = BandedMatrix::identity(m.q.nrows(), m.q.prec());

    let residuals = vec![
        compare(PROP_H_TTT, &m.h, &t_tt, block, true)?,
        compare(PROP_HT, &m.h.mul(&m.t)?, &m.t.mul(&j2sq)?, block, true)?,
        compare(PROP_QR, &m.q.mul(&m.r)?, &m.j.shifted(c, sigma), block, true)?,
        compare(PROP_RQ, &m.r.mul(&m.q)?, &m.j2.shifted(c, sigma), block, true)?,
        compare(PROP_J2SQ, &j2sq, &rrt, block, true)?,
        compare(PROP_JSQ, &jsq, &rtr, block, true)?,
        compare(PROP_RRT_TTT, &rrt, &ttt, block, true)?,
        compare(DIAG_QTQ, &qtq, &ident, block, false)?,
        compare(DIAG_CHOL, &m.l.mul(&m.l.transpose())?, &m.j.shifted(c, sigma), block, false)?,
        compare(DIAG_CHOL1, &m.l1.mul(&m.l1.transpose())?, &m.j1.shifted(c, sigma), block, false)?,
        compare(DIAG_J2, &m.j2, &m.j2_ledger, block, false)?,
    ];
    let k = 5.min(m.q.exact_size());
    Ok(ResidualReport {
        size: block,
        residuals,
        qqt_distance: qqt_leading_distance(&m.q, k)?,
    })
}
