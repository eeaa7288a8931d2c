//! Exact-rational reference computations.
//!
//! Everything here works in `Q`: moment functionals, Gram–Schmidt, and
//! orthonormal-level quantities in squared form `value^2 = num^2 / (|A|^2 |B|^2)`
//! with the sign carried separately, so no square roots are ever taken.

pub mod example;
pub mod fixture;

use std::cmp::Ordering;

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{MeasureFamily, MeasureSpec, MomentSource};

/// Gram–Schmidt degree limit; rational bit sizes grow quickly past it.
pub const ORACLE_DEGREE_CAP: usize = 12;

/// Polynomial with rational coefficients, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.cmp0() == Ordering::Equal) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        RatPoly::new(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Rational::new(); k + 1];
        coeffs[k] = Rational::from(1);
        RatPoly { coeffs }
    }

    /// `(x - c)^k`
    pub fn shift_power(c: &Rational, k: u32) -> Self {
        let lin = RatPoly::new(vec![Rational::from(-c), Rational::from(1)]);
        (0..k).fold(RatPoly::constant(Rational::from(1)), |acc, _| acc.mul(&lin))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &RatPoly) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::new();
        RatPoly::new(
            (0..n)
                .map(|k| {
                    let a = self.coeffs.get(k).unwrap_or(&zero);
                    let b = other.coeffs.get(k).unwrap_or(&zero);
                    Rational::from(a + b)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &RatPoly) -> Self {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        RatPoly::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    pub fn mul(&self, other: &RatPoly) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        RatPoly::new(out)
    }

    pub fn derivative(&self) -> Self {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Rational::from(c * k as u32))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Value at a float point, at the point's precision.
    pub fn eval_float(&self, x: &Real) -> Real {
        let prec = x.prec();
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionalKind {
    /// `int f g dmu`
    Standard,
    /// `sigma^k int (x - c)^k f g dmu`; `sigma = +-1` keeps the form positive.
    Iterated { k: u32, c: Rational, sigma: i32 },
    /// `int f g dmu + M f(c) g(c) + N f'(c) g'(c)`
    Sobolev { c: Rational, m: Rational, n: Rational },
}

/// A bilinear form on polynomials driven by the moments of `mu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentFunctional {
    pub kind: FunctionalKind,
    pub moments: Vec<Rational>,
}

impl MomentFunctional {
    pub fn new(kind: FunctionalKind, moments: Vec<Rational>) -> Self {
        MomentFunctional { kind, moments }
    }

    /// `int h dmu`.
    pub fn integrate(&self, h: &RatPoly) -> Result<Rational> {
        if let Some(d) = h.degree() {
            if d >= self.moments.len() {
                return Err(Error::UnsupportedByOracle(format!(
                    "degree {d} integrand needs more than the {} available moments",
                    self.moments.len()
                )));
            }
        }
        let mut acc = Rational::new();
        for (c, m) in h.coeffs().iter().zip(&self.moments) {
            acc += Rational::from(c * m);
        }
        Ok(acc)
    }

    pub fn pair(&self, f: &RatPoly, g: &RatPoly) -> Result<Rational> {
        let fg = f.mul(g);
        match &self.kind {
            FunctionalKind::Standard => self.integrate(&fg),
            FunctionalKind::Iterated { k, c, sigma } => {
                let v = self.integrate(&fg.mul(&RatPoly::shift_power(c, *k)))?;
                Ok(if *sigma < 0 && k % 2 == 1 { -v } else { v })
            }
            FunctionalKind::Sobolev { c, m, n } => {
                let mut v = self.integrate(&fg)?;
                v += (m * f.eval(c)) * g.eval(c);
                v += (n * f.derivative().eval(c)) * g.derivative().eval(c);
                Ok(v)
            }
        }
    }
}

/// `mu_n = (n + alpha)!` for `n < count`; `alpha` must be a nonnegative integer.
pub fn laguerre_moments(alpha: &Rational, count: usize) -> Result<Vec<Rational>> {
    if *alpha.denom() != 1 || alpha.cmp0() == Ordering::Less {
        return Err(Error::UnsupportedByOracle(format!(
            "exact Laguerre moments need a nonnegative integer alpha (got {alpha})"
        )));
    }
    let a = alpha
        .numer()
        .to_u32()
        .ok_or_else(|| Error::UnsupportedByOracle("alpha too large".into()))?;
    Ok((0..count as u32)
        .map(|n| Rational::from(Integer::from(Integer::factorial(n + a))))
        .collect())
}

/// Exact moments of a measure, when its spec provides them.
pub fn measure_moments(spec: &MeasureSpec, count: usize) -> Result<Vec<Rational>> {
    match (&spec.moments, &spec.family) {
        (MomentSource::LaguerreFactorial, MeasureFamily::Laguerre { alpha }) => {
            let a = alpha
                .to_rational()
                .ok_or_else(|| Error::InvalidParameter("alpha is not finite".into()))?;
            laguerre_moments(&a, count)
        }
        (MomentSource::Supplied(m), _) => {
            if m.len() < count {
                return Err(Error::UnsupportedByOracle(format!(
                    "{count} moments needed, {} supplied",
                    m.len()
                )));
            }
            Ok(m[..count].to_vec())
        }
        _ => Err(Error::UnsupportedByOracle("measure has no exact moments".into())),
    }
}

/// Monic orthogonal polynomials of degrees `0..=n` with their squared norms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolySystem {
    pub polys: Vec<RatPoly>,
    pub norms: Vec<Rational>,
}

impl RationalPolySystem {
    pub fn degree(&self) -> usize {
        self.polys.len() - 1
    }

    /// `(beta_n, gamma_n)` of `x P_n = P_{n+1} + beta_n P_n + gamma_n P_{n-1}`
    /// for `n < degree`, read off the coefficients.
    pub fn recurrence(&self) -> (Vec<Rational>, Vec<Rational>) {
        let mut beta = Vec::new();
        let mut gamma = Vec::new();
        for n in 0..self.degree() {
            // beta_n = [x^n]P_n - [x^{n+1}]P_{n+1} (subleading coefficients)
            let sub = |k: usize| {
                if k == 0 {
                    Rational::new()
                } else {
                    self.polys[k].coeffs()[k - 1].clone()
                }
            };
            beta.push(sub(n) - sub(n + 1));
            gamma.push(if n == 0 {
                Rational::new()
            } else {
                Rational::from(&self.norms[n] / &self.norms[n - 1])
            });
        }
        (beta, gamma)
    }
}

/// Monic Gram–Schmidt on `1, x, ..., x^n`.
pub fn gram_schmidt(functional: &MomentFunctional, n: usize) -> Result<RationalPolySystem> {
    if n > ORACLE_DEGREE_CAP {
        return Err(Error::UnsupportedByOracle(format!(
            "degree {n} exceeds the oracle cap {ORACLE_DEGREE_CAP}"
        )));
    }
    let mut polys: Vec<RatPoly> = Vec::with_capacity(n + 1);
    let mut norms: Vec<Rational> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let xk = RatPoly::monomial(k);
        let mut p = xk.clone();
        for (q, nq) in polys.iter().zip(&norms) {
            let coef = functional.pair(&xk, q)? / nq;
            p = p.sub(&q.scale(&coef));
        }
        let norm = functional.pair(&p, &p)?;
        if norm.cmp0() != Ordering::Greater {
            return Err(Error::NotPositiveDefinite {
                index: k,
                pivot: norm.to_string(),
            });
        }
        polys.push(p);
        norms.push(norm);
    }
    Ok(RationalPolySystem { polys, norms })
}

/// An orthonormal-level quantity stored as its exact square plus sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquaredEntry {
    pub square: Rational,
    /// -1, 0 or 1.
    pub sign: i8,
}

impl SquaredEntry {
    pub fn zero() -> Self {
        SquaredEntry {
            square: Rational::new(),
            sign: 0,
        }
    }

    /// `num / sqrt(na nb)` in squared form.
    pub fn from_inner(num: &Rational, na: &Rational, nb: &Rational) -> Self {
        let sq = Rational::from(num.square_ref()) / Rational::from(na * nb);
        SquaredEntry {
            sign: match num.cmp0() {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            },
            square: sq,
        }
    }

    pub fn from_parts(num: &str, den: &str, sign: i8) -> Result<Self> {
        let parse = |s: &str| {
            s.parse::<Integer>()
                .map_err(|e| Error::InvalidParameter(format!("bad integer {s:?}: {e}")))
        };
        let (n, d) = (parse(num)?, parse(den)?);
        if d.cmp0() != Ordering::Greater {
            return Err(Error::InvalidParameter(format!("nonpositive denominator {den}")));
        }
        let square = Rational::from((n, d));
        let sign = if square.cmp0() == Ordering::Equal { 0 } else { sign.signum() };
        Ok(SquaredEntry { square, sign })
    }

    /// Float check: sign agrees and `|x^2 - square| <= tol * square`; a zero
    /// entry needs `|x| <= tol`.
    pub fn matches_float(&self, x: &Real, tol: &Real) -> bool {
        let prec = x.prec();
        if self.sign == 0 {
            return Float::with_val(prec, x.abs_ref()) <= *tol;
        }
        let sign_ok = (self.sign > 0 && *x > 0) || (self.sign < 0 && *x < 0);
        let sq = Float::with_val(prec, x.square_ref());
        let want = Float::with_val(prec, &self.square);
        let diff = Float::with_val(prec, &sq - &want).abs();
        sign_ok && diff <= Float::with_val(prec, tol * &want)
    }

    /// The value `sign * sqrt(square)` at the given precision.
    pub fn to_float(&self, prec: u32) -> Real {
        let v = Float::with_val(prec, &self.square).sqrt();
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }
}

/// Float entry `x` against the oracle entry; returns a description on mismatch.
pub fn squared_entry_compare(x: &Real, expected: &SquaredEntry, tol: &Real) -> Option<String> {
    if expected.matches_float(x, tol) {
        None
    } else {
        Some(format!(
            "expected sign {} and square {} (~{:e}), got {:e}",
            expected.sign,
            expected.square,
            expected.square.to_f64(),
            x.to_f64()
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn lag0(count: usize) -> MomentFunctional {
        MomentFunctional::new(FunctionalKind::Standard, laguerre_moments(&q(0, 1), count).unwrap())
    }

    #[test]
    fn moment_examples() {
        let m = laguerre_moments(&q(0, 1), 4).unwrap();
        assert_eq!(m[2], 2);
        let m1 = laguerre_moments(&q(1, 1), 3).unwrap();
        assert_eq!(m1, vec![q(1, 1), q(2, 1), q(6, 1)]);
        assert!(matches!(laguerre_moments(&q(1, 2), 3), Err(Error::UnsupportedByOracle(_))));
        // (x + 1)^2 dmu at order 0: mu_2 + 2 mu_1 + mu_0.
        let f = MomentFunctional::new(
            FunctionalKind::Iterated { k: 2, c: q(-1, 1), sigma: 1 },
            laguerre_moments(&q(0, 1), 4).unwrap(),
        );
        let one = RatPoly::constant(q(1, 1));
        assert_eq!(f.pair(&one, &one).unwrap(), 5);
        let s = MomentFunctional::new(
            FunctionalKind::Sobolev { c: q(-1, 1), m: q(1, 1), n: q(1, 1) },
            laguerre_moments(&q(0, 1), 4).unwrap(),
        );
        assert_eq!(s.pair(&one, &one).unwrap(), 2);
    }

    #[test]
    fn gram_schmidt_examples() {
        let sys = gram_schmidt(&lag0(20), 4).unwrap();
        assert_eq!(sys.polys[1], RatPoly::new(vec![q(-1, 1), q(1, 1)]));
        assert_eq!(sys.norms[1], 1);
        assert_eq!(sys.norms[2], 4);
        let (beta, gamma) = sys.recurrence();
        for n in 0..4 {
            assert_eq!(beta[n], 2 * n as u32 + 1);
            assert_eq!(gamma[n], (n * n) as u32);
        }
        let lag1 = MomentFunctional::new(
            FunctionalKind::Standard,
            laguerre_moments(&q(1, 1), 10).unwrap(),
        );
        let (beta, gamma) = gram_schmidt(&lag1, 3).unwrap().recurrence();
        assert_eq!((beta[1].clone(), gamma[1].clone()), (q(4, 1), q(2, 1)));

        let sob = MomentFunctional::new(
            FunctionalKind::Sobolev { c: q(-1, 1), m: q(1, 1), n: q(1, 1) },
            laguerre_moments(&q(0, 1), 20).unwrap(),
        );
        let s = gram_schmidt(&sob, 3).unwrap();
        assert_eq!(s.polys[1], RatPoly::monomial(1));
    }

    #[test]
    fn gram_schmidt_limits() {
        assert!(matches!(gram_schmidt(&lag0(40), 13), Err(Error::UnsupportedByOracle(_))));
        assert!(matches!(gram_schmidt(&lag0(5), 4), Err(Error::UnsupportedByOracle(_))));
        // A functional that is not positive definite.
        let bad = MomentFunctional::new(FunctionalKind::Standard, vec![q(1, 1), q(0, 1), q(-1, 1)]);
        assert!(matches!(gram_schmidt(&bad, 1), Err(Error::NotPositiveDefinite { index: 1, .. })));
    }

    #[test]
    fn squared_entries() {
        let e = SquaredEntry::from_inner(&q(-11, 2), &q(2, 1), &q(1, 1));
        assert_eq!(e.square, q(121, 8));
        assert_eq!(e.sign, -1);
        let prec = 256;
        let tol = Float::with_val(prec, 1e-30);
        assert!(e.matches_float(&e.to_float(prec), &tol));
        assert!(!e.matches_float(&-e.to_float(prec), &tol));
        assert!(squared_entry_compare(&Float::with_val(prec, 0), &SquaredEntry::zero(), &tol).is_none());
        let p = SquaredEntry::from_parts("4", "5", 1).unwrap();
        assert!(p.matches_float(&(Float::with_val(prec, 2) / Float::with_val(prec, 5).sqrt()), &tol));
        assert!(SquaredEntry::from_parts("4", "0", 1).is_err());
    }

    #[test]
    fn poly_arithmetic() {
        let p = RatPoly::shift_power(&q(-1, 1), 2);
        assert_eq!(p.coeffs(), &[q(1, 1), q(2, 1), q(1, 1)]);
        assert_eq!(p.derivative().eval(&q(3, 1)), 8);
        assert_eq!(p.sub(&p).degree(), None);
        assert_eq!(p.eval_float(&Float::with_val(64, 0.5)), 2.25);
    }
}
