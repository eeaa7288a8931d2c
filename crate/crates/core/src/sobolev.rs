//! Sobolev-type orthogonal polynomials for
//! `<f, g>_S = int f g dmu + M f(c) g(c) + N f'(c) g'(c)`, with `c` outside
//! the support of `mu`.
//!
//! The monic `S_n` is expanded in the standard family,
//! `S_n(x) = P_n(x) - M S_n(c) K_{n-1}(x, c) - N S_n'(c) K_{n-1}^{(0,1)}(x, c)`,
//! and `(S_n(c), S_n'(c))` solve a 2x2 system built from confluent kernels.
//!
//! Derivative index. Projecting `S_n` onto `P_j` gives the coefficient
//! `-(M S_n(c) P_j(c) + N S_n'(c) P_j'(c)) / ||P_j||^2`; a version with
//! `P_n'(c)` in place of `P_j'(c)` also circulates, and the same swap appears
//! in the connection coefficient `gamma_{n-1,n}` (`p_n'(c)` versus
//! `p_{n-1}'(c)`). Both are available through [`DerivativeIndexReading`]. Only
//! [`DerivativeIndexReading::Expansion`] produces polynomials that are exactly
//! orthogonal under the rational oracle and a pentadiagonal `H = T T^T`; the
//! literal variant already produces a nonpositive `||S_2||^2` for Laguerre
//! `alpha = 0`, `c = -1`, `M = N = 1`. Expansion is the default.

use rug::Float;

use crate::christoffel::ChristoffelLedger;
use crate::error::{check_index, Error, Result};
use crate::kernels::{kernel_at, kernel_dy, KernelConfluents};
use crate::real::{self, Real};
use crate::spectral::{eval_jet, MeasureSpec, RecurrenceTable, Side};

/// A base measure plus point masses `M` on `f(c)` and `N` on `f'(c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevSpec {
    pub base: MeasureSpec,
    pub c: Real,
    pub point_mass: Real,
    pub derivative_mass: Real,
    side: Side,
}

impl SobolevSpec {
    pub fn new(base: MeasureSpec, c: Real, point_mass: Real, derivative_mass: Real) -> Result<Self> {
        for (name, v) in [("M", &point_mass), ("N", &derivative_mass), ("c", &c)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if point_mass < 0 || derivative_mass < 0 {
            return Err(Error::InvalidParameter(format!(
                "masses must be nonnegative (M = {}, N = {})",
                point_mass.to_f64(),
                derivative_mass.to_f64()
            )));
        }
        let side = base.support.side_of(&c)?;
        let prec = base.precision();
        Ok(SobolevSpec {
            c: Float::with_val(prec, c),
            point_mass: Float::with_val(prec, point_mass),
            derivative_mass: Float::with_val(prec, derivative_mass),
            base,
            side,
        })
    }

    /// Which side of the support `c` lies on.
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn precision(&self) -> u32 {
        self.base.precision()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeIndexReading {
    /// `P_j'(c)` inside the expansion coefficients; `p_{n-1}'(c)` in `gamma_{n-1,n}`.
    #[default]
    Expansion,
    /// `P_n'(c)` inside the expansion coefficients; `p_n'(c)` in `gamma_{n-1,n}`.
    Literal,
}

/// Per-index Sobolev data for `n` in `0..size`.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevLedger {
    pub spec: SobolevSpec,
    pub reading: DerivativeIndexReading,
    /// `S_n(c)`
    pub sc: Vec<Real>,
    /// `S_n'(c)`
    pub sdc: Vec<Real>,
    /// `||S_n||_S^2`
    pub norm_sq: Vec<Real>,
    /// `t_n = 1 / ||S_n||_S`
    pub t: Vec<Real>,
    /// `gamma_{n,n}`
    pub gamma_nn: Vec<Real>,
    /// `gamma_{n-1,n}`; zero at `n = 0`.
    pub gamma_n1: Vec<Real>,
    /// `gamma_{n-2,n}`; zero for `n < 2`.
    pub gamma_n2: Vec<Real>,
    /// Five-term coefficients: `a_n` sits at `H[n-2][n]`, `b_n` at `H[n-1][n]`, `c_n` at `H[n][n]`.
    pub a: Vec<Real>,
    pub b: Vec<Real>,
    pub cdiag: Vec<Real>,
    /// `alpha_{n+1,n}`
    pub alpha1: Vec<Real>,
    /// `alpha_{n,n}`
    pub alpha0: Vec<Real>,
    /// `xi_{n,n}`, `xi_{n-1,n}`, `xi_{n-2,n}`
    pub xi0: Vec<Real>,
    pub xi1: Vec<Real>,
    pub xi2: Vec<Real>,
}

/// Solves the 2x2 boundary system for `(S_n(c), S_n'(c))`.
///
/// `kernels` holds the confluent values of `K_{n-1}` (use
/// [`KernelConfluents::empty`] at `n = 0`); `pn`, `dpn` are `P_n(c)`, `P_n'(c)`.
pub fn sobolev_boundary(
    kernels: &KernelConfluents,
    spec: &SobolevSpec,
    n: usize,
    pn: &Real,
    dpn: &Real,
) -> Result<(Real, Real)> {
    let prec = spec.precision();
    let m = &spec.point_mass;
    let nn = &spec.derivative_mass;
    let a11 = Float::with_val(prec, m * &kernels.k) + 1u32;
    let a12 = Float::with_val(prec, nn * &kernels.k01);
    let a21 = Float::with_val(prec, m * &kernels.k10);
    let a22 = Float::with_val(prec, nn * &kernels.k11) + 1u32;
    solve2(n, [a11, a12, a21, a22], pn, dpn)
}

fn solve2(n: usize, [a11, a12, a21, a22]: [Real; 4], b1: &Real, b2: &Real) -> Result<(Real, Real)> {
    let prec = a11.prec();
    let det = Float::with_val(prec, &a11 * &a22) - Float::with_val(prec, &a12 * &a21);
    if det.is_zero() {
        return Err(Error::DegenerateSpec { n });
    }
    let x = (Float::with_val(prec, b1 * &a22) - Float::with_val(prec, &a12 * b2)) / &det;
    let y = (Float::with_val(prec, &a11 * b2) - Float::with_val(prec, &a21 * b1)) / &det;
    Ok((x, y))
}

/// `(||S_n||_S^2, t_n)` from `||P_n||^2 + M S_n(c) P_n(c) + N S_n'(c) P_n'(c)`.
pub fn sobolev_norm(
    rec: &RecurrenceTable,
    spec: &SobolevSpec,
    n: usize,
    boundary: (&Real, &Real),
    pn: (&Real, &Real),
) -> Result<(Real, Real)> {
    check_index(n, rec.size())?;
    let prec = rec.prec();
    let mut norm = rec.norm_sq(n).clone();
    norm += Float::with_val(prec, &spec.point_mass * boundary.0) * pn.0;
    norm += Float::with_val(prec, &spec.derivative_mass * boundary.1) * pn.1;
    if norm <= 0 {
        return Err(Error::NumericalFailure(format!(
            "computed ||S_{n}||^2 is not positive; increase the precision"
        )));
    }
    let t = real::sqrt(&norm).recip();
    Ok((norm, t))
}

impl SobolevLedger {
    /// Fills indices `0..size`. Needs `rec.size() > size` and a Christoffel
    /// ledger of at least `size` entries at the same `c`.
    pub fn build(
        rec: &RecurrenceTable,
        chris: &ChristoffelLedger,
        spec: &SobolevSpec,
        size: usize,
        reading: DerivativeIndexReading,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("ledger size must be at least 1".into()));
        }
        check_index(size, rec.size())?;
        check_index(size - 1, chris.size())?;
        if chris.c() != &spec.c {
            return Err(Error::Internal("Christoffel ledger built at a different c".into()));
        }
        let prec = spec.precision();
        let c = &spec.c;
        let m = &spec.point_mass;
        let nn = &spec.derivative_mass;
        let monic = eval_jet(rec, size, c, 1)?;
        let onj = rec.orthonormal_jet(size, c, 1)?;
        let p = |k: usize| onj.value(k);
        let dp = |k: usize| onj.derivative(k, 1);

        let mut ledger = SobolevLedger {
            spec: spec.clone(),
            reading,
            sc: Vec::with_capacity(size),
            sdc: Vec::with_capacity(size),
            norm_sq: Vec::with_capacity(size),
            t: Vec::with_capacity(size),
            gamma_nn: Vec::with_capacity(size),
            gamma_n1: Vec::with_capacity(size),
            gamma_n2: Vec::with_capacity(size),
            a: Vec::with_capacity(size),
            b: Vec::with_capacity(size),
            cdiag: Vec::with_capacity(size),
            alpha1: Vec::with_capacity(size),
            alpha0: Vec::with_capacity(size),
            xi0: Vec::with_capacity(size),
            xi1: Vec::with_capacity(size),
            xi2: Vec::with_capacity(size),
        };

        // Running confluent sums for K_{n-1} and the literal-reading sums
        // sum_{j<n} r_j p_j(c), sum_{j<n} r_j p_j'(c).
        let mut conf = KernelConfluents::empty(c);
        let mut lit_v = real::zero(prec);
        let mut lit_d = real::zero(prec);
        for n in 0..size {
            let pn = monic.value(n);
            let dpn = monic.derivative(n, 1);
            let (sc, sdc) = match reading {
                DerivativeIndexReading::Expansion => sobolev_boundary(&conf, spec, n, pn, dpn)?,
                DerivativeIndexReading::Literal => {
                    let a11 = Float::with_val(prec, m * &conf.k) + 1u32;
                    let a12 = Float::with_val(prec, nn * dpn) * &lit_v;
                    let a21 = Float::with_val(prec, m * &conf.k10);
                    let a22 = Float::with_val(prec, nn * dpn) * &lit_d + 1u32;
                    solve2(n, [a11, a12, a21, a22], pn, dpn)?
                }
            };
            let (norm, t) = sobolev_norm(rec, spec, n, (&sc, &sdc), (pn, dpn))?;

            // Orthonormal boundary values.
            let s_c = Float::with_val(prec, &t * &sc);
            let s_dc = Float::with_val(prec, &t * &sdc);

            let gnn = Float::with_val(prec, &t / &chris.r2[n]);
            let gn1 = if n >= 1 {
                let kr = real::sqrt(&Float::with_val(prec, &chris.kcc[n - 1] / &chris.kcc[n]));
                let dk = match reading {
                    DerivativeIndexReading::Expansion => dp(n - 1),
                    DerivativeIndexReading::Literal => dp(n),
                };
                let mut inner = Float::with_val(prec, m * &s_c) * p(n - 1);
                inner += Float::with_val(prec, nn * &s_dc) * dk;
                inner *= Float::with_val(prec, rec.leading(n) / rec.leading(n - 1));
                inner *= &chris.e[n - 1];
                inner += Float::with_val(prec, &chris.d[n - 1] * &t) / rec.leading(n);
                -(kr * inner)
            } else {
                real::zero(prec)
            };
            let gn2 = if n >= 2 {
                Float::with_val(prec, &chris.r2[n - 2] / &t)
            } else {
                real::zero(prec)
            };

            let mut alpha1 = Float::with_val(prec, m * &s_c) * p(n + 1);
            alpha1 += Float::with_val(prec, nn * &s_dc) * dp(n + 1);
            let mut alpha0 = Float::with_val(prec, &t / rec.leading(n));
            alpha0 += Float::with_val(prec, m * &s_c) * p(n);
            alpha0 += Float::with_val(prec, nn * &s_dc) * dp(n);

            let xi0 = real::sqrt(&chris.e[n]);
            let xi1 = if n >= 1 {
                let kr = real::sqrt(&Float::with_val(prec, &chris.kcc[n - 1] / &chris.kcc[n]));
                -(kr * &chris.d[n - 1])
            } else {
                real::zero(prec)
            };
            let xi2 = if n >= 2 {
                let kr = real::sqrt(&Float::with_val(prec, &chris.kcc[n - 2] / &chris.kcc[n - 1]));
                kr * Float::with_val(prec, rec.leading(n - 1) / rec.leading(n))
            } else {
                real::zero(prec)
            };

            ledger.sc.push(sc);
            ledger.sdc.push(sdc);
            ledger.norm_sq.push(norm);
            ledger.t.push(t);
            ledger.gamma_nn.push(gnn);
            ledger.gamma_n1.push(gn1);
            ledger.gamma_n2.push(gn2);
            ledger.alpha1.push(alpha1);
            ledger.alpha0.push(alpha0);
            ledger.xi0.push(xi0);
            ledger.xi1.push(xi1);
            ledger.xi2.push(xi2);
            let (a, b, cd) = ledger.products(n);
            ledger.a.push(a);
            ledger.b.push(b);
            ledger.cdiag.push(cd);

            // Extend the running sums to K_n.
            let pc = p(n);
            let dpc = dp(n);
            conf.k += Float::with_val(prec, pc * pc);
            let cross = Float::with_val(prec, pc * dpc);
            conf.k01 += &cross;
            conf.k10 += &cross;
            conf.k11 += Float::with_val(prec, dpc * dpc);
            conf.n = n;
            lit_v += Float::with_val(prec, rec.leading(n) * pc);
            lit_d += Float::with_val(prec, rec.leading(n) * dpc);
        }
        Ok(ledger)
    }

    /// `(a_n, b_n, c_n)` from the gamma entries already in the ledger.
    fn products(&self, n: usize) -> (Real, Real, Real) {
        let prec = self.spec.precision();
        let a = if n >= 2 {
            Float::with_val(prec, &self.gamma_nn[n - 2] * &self.gamma_n2[n])
        } else {
            real::zero(prec)
        };
        let b = if n >= 1 {
            let mut v = Float::with_val(prec, &self.gamma_nn[n - 1] * &self.gamma_n1[n]);
            if n >= 2 {
                v += Float::with_val(prec, &self.gamma_n2[n] * &self.gamma_n1[n - 1]);
            }
            v
        } else {
            real::zero(prec)
        };
        let mut cd = real::square(&self.gamma_nn[n]);
        cd += real::square(&self.gamma_n1[n]);
        cd += real::square(&self.gamma_n2[n]);
        (a, b, cd)
    }

    pub fn size(&self) -> usize {
        self.t.len()
    }

    pub fn prec(&self) -> u32 {
        self.spec.precision()
    }

    /// `rho_{k,n}`, the coefficient of `s_k` in `(x - c)^2 s_n`; zero when `|k - n| > 2`.
    pub fn rho(&self, k: usize, n: usize) -> Result<Real> {
        let (lo, hi) = (k.min(n), k.max(n));
        check_index(hi, self.size())?;
        Ok(match hi - lo {
            0 => self.cdiag[hi].clone(),
            1 => self.b[hi].clone(),
            2 => self.a[hi].clone(),
            _ => real::zero(self.prec()),
        })
    }
}

/// `(gamma_{n,n}, gamma_{n-1,n}, gamma_{n-2,n})` in `s_n = sum_k gamma_{k,n} p_k^[2]`.
pub fn gamma_connection(ledger: &SobolevLedger, n: usize) -> Result<(Real, Real, Real)> {
    check_index(n, ledger.size())?;
    Ok((
        ledger.gamma_nn[n].clone(),
        ledger.gamma_n1[n].clone(),
        ledger.gamma_n2[n].clone(),
    ))
}

/// `(a_n, b_n, c_n)`.
pub fn five_term_coeffs(ledger: &SobolevLedger, n: usize) -> Result<(Real, Real, Real)> {
    check_index(n, ledger.size())?;
    Ok((ledger.a[n].clone(), ledger.b[n].clone(), ledger.cdiag[n].clone()))
}

/// `(alpha_{n+1,n}, alpha_{n,n}, xi_{n,n}, xi_{n-1,n}, xi_{n-2,n})`.
pub fn aux_connections(ledger: &SobolevLedger, n: usize) -> Result<[Real; 5]> {
    check_index(n, ledger.size())?;
    Ok([
        ledger.alpha1[n].clone(),
        ledger.alpha0[n].clone(),
        ledger.xi0[n].clone(),
        ledger.xi1[n].clone(),
        ledger.xi2[n].clone(),
    ])
}

/// `S_n(x)`, or `s_n(x) = t_n S_n(x)` when `normalized`.
pub fn eval_sobolev(
    rec: &RecurrenceTable,
    ledger: &SobolevLedger,
    n: usize,
    x: &Real,
    normalized: bool,
) -> Result<Real> {
    check_index(n, ledger.size())?;
    let prec = ledger.prec();
    let spec = &ledger.spec;
    let jet = eval_jet(rec, n, x, 0)?;
    let mut v = jet.value(n).clone();
    if n > 0 {
        let k = kernel_at(rec, n - 1, x, &spec.c)?;
        v -= Float::with_val(prec, &spec.point_mass * &ledger.sc[n]) * k;
        let tail = match ledger.reading {
            DerivativeIndexReading::Expansion => kernel_dy(rec, n - 1, x, &spec.c)?,
            DerivativeIndexReading::Literal => {
                // P_n'(c) sum_{j<n} P_j(x) / ||P_j||^2
                let cj = eval_jet(rec, n, &spec.c, 1)?;
                let mut s = real::zero(prec);
                for j in 0..n {
                    s += Float::with_val(prec, jet.value(j) / rec.norm_sq(j));
                }
                s * cj.derivative(n, 1)
            }
        };
        v -= Float::with_val(prec, &spec.derivative_mass * &ledger.sdc[n]) * tail;
    }
    if normalized {
        v *= &ledger.t[n];
    }
    Ok(v)
}

/// `S_n(x)` as the quotient of the 3x3 bordered determinant by the 2x2 system
/// determinant. Independent of the stored boundary values.
pub fn eval_sobolev_determinant(
    rec: &RecurrenceTable,
    spec: &SobolevSpec,
    n: usize,
    x: &Real,
) -> Result<Real> {
    let prec = spec.precision();
    let c = &spec.c;
    let m = &spec.point_mass;
    let nn = &spec.derivative_mass;
    let jx = eval_jet(rec, n, x, 0)?;
    let jc = eval_jet(rec, n, c, 1)?;
    if n == 0 {
        return Ok(jx.value(0).clone());
    }
    let conf = crate::kernels::kernel_confluents_sum(rec, n - 1, c)?;
    let kx = kernel_at(rec, n - 1, x, c)?;
    let kdx = kernel_dy(rec, n - 1, x, c)?;
    let a11 = Float::with_val(prec, m * &conf.k) + 1u32;
    let a12 = Float::with_val(prec, nn * &conf.k01);
    let a21 = Float::with_val(prec, m * &conf.k10);
    let a22 = Float::with_val(prec, nn * &conf.k11) + 1u32;
    let det2 = Float::with_val(prec, &a11 * &a22) - Float::with_val(prec, &a12 * &a21);
    if det2.is_zero() {
        return Err(Error::DegenerateSpec { n });
    }
    let row0 = [jx.value(n).clone(), Float::with_val(prec, m * &kx), Float::with_val(prec, nn * &kdx)];
    let row1 = [jc.value(n).clone(), a11, a12];
    let row2 = [jc.derivative(n, 1).clone(), a21, a22];
    let minor = |u: &Real, v: &Real, w: &Real, z: &Real| {
        Float::with_val(prec, u * z) - Float::with_val(prec, v * w)
    };
    let mut det3 = Float::with_val(prec, &row0[0] * minor(&row1[1], &row1[2], &row2[1], &row2[2]));
    det3 -= Float::with_val(prec, &row0[1] * minor(&row1[0], &row1[2], &row2[0], &row2[2]));
    det3 += Float::with_val(prec, &row0[2] * minor(&row1[0], &row1[1], &row2[0], &row2[1]));
    Ok(det3 / det2)
}

/// Relative residual of `(x - c)^2 s_n(x) = sum_{|k-n|<=2} rho_{k,n} s_k(x)`:
/// `|lhs - rhs| / (|lhs| + sum |terms|)`. Needs the ledger through `n + 2`.
pub fn five_term_residual(
    rec: &RecurrenceTable,
    ledger: &SobolevLedger,
    n: usize,
    x: &Real,
) -> Result<Real> {
    check_index(n + 2, ledger.size())?;
    let prec = ledger.prec();
    let h = Float::with_val(prec, x - &ledger.spec.c);
    let lhs = real::square(&h) * eval_sobolev(rec, ledger, n, x, true)?;
    let mut rhs = real::zero(prec);
    let mut scale = real::abs(&lhs);
    for k in n.saturating_sub(2)..=n + 2 {
        let term = ledger.rho(k, n)? * eval_sobolev(rec, ledger, k, x, true)?;
        scale += real::abs(&term);
        rhs += term;
    }
    let diff = real::abs(&(lhs - rhs));
    if scale.is_zero() {
        return Ok(diff);
    }
    Ok(diff / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::christoffel::iterated_orthonormal_values;
    use crate::kernels::kernel_confluents;
    use crate::real::{from_f64, rel_diff};
    use proptest::prelude::*;
    use rug::Rational;

    const PREC: u32 = 256;

    fn r(v: f64) -> Real {
        from_f64(PREC, v)
    }

    fn q(n: i64, d: i64) -> Real {
        Float::with_val(PREC, Rational::from((n, d)))
    }

    fn close(a: &Real, b: &Real) -> bool {
        rel_diff(a, b) < r(1e-60)
    }

    fn sq(v: &Real) -> Real {
        real::square(v)
    }

    struct Setup {
        rec: RecurrenceTable,
        chris: ChristoffelLedger,
        ledger: SobolevLedger,
    }

    fn setup(c: f64, m: f64, n: f64, size: usize, reading: DerivativeIndexReading) -> Setup {
        let base = MeasureSpec::laguerre(r(0.0)).unwrap();
        let spec = SobolevSpec::new(base, r(c), r(m), r(n)).unwrap();
        let rec = spec.base.recurrence(size + 3).unwrap();
        let chris = ChristoffelLedger::build(&rec, &spec.c, size + 1).unwrap();
        let ledger = SobolevLedger::build(&rec, &chris, &spec, size, reading).unwrap();
        Setup { rec, chris, ledger }
    }

    fn example(size: usize) -> Setup {
        setup(-1.0, 1.0, 1.0, size, DerivativeIndexReading::Expansion)
    }

    #[test]
    fn spec_validation() {
        let base = MeasureSpec::laguerre(r(0.0)).unwrap();
        assert!(SobolevSpec::new(base.clone(), r(-1.0), r(-0.5), r(1.0)).is_err());
        assert!(SobolevSpec::new(base.clone(), r(-1.0), r(1.0), r(-1e-9)).is_err());
        assert!(SobolevSpec::new(base.clone(), r(2.0), r(1.0), r(1.0)).is_err());
        assert!(SobolevSpec::new(base.clone(), r(f64::NAN), r(1.0), r(1.0)).is_err());
        let ok = SobolevSpec::new(base, r(-1.0), r(0.0), r(0.0)).unwrap();
        assert_eq!(ok.side(), Side::Left);
    }

    #[test]
    fn boundary_examples() {
        let s = example(4);
        assert_eq!(s.ledger.sc[0], 1);
        assert_eq!(s.ledger.sdc[0], 0);
        assert!(close(&s.ledger.sc[1], &r(-1.0)));
        assert!(close(&s.ledger.sdc[1], &r(1.0)));
        // S_2(x) = x^2 - 3x/4 - 3/2 by exact Gram–Schmidt.
        assert!(close(&s.ledger.sc[2], &q(1, 4)));
        assert!(close(&s.ledger.sdc[2], &q(-11, 4)));
        // Standalone entry point with closed-form confluents agrees with the ledger.
        let c = r(-1.0);
        let conf = kernel_confluents(&s.rec, 1, &c).unwrap();
        let jet = eval_jet(&s.rec, 2, &c, 1).unwrap();
        let (a, b) =
            sobolev_boundary(&conf, &s.ledger.spec, 2, jet.value(2), jet.derivative(2, 1)).unwrap();
        assert!(close(&a, &s.ledger.sc[2]));
        assert!(close(&b, &s.ledger.sdc[2]));
    }

    #[test]
    fn norm_examples() {
        let s = example(4);
        assert!(close(&s.ledger.norm_sq[0], &r(2.0)));
        assert!(close(&sq(&s.ledger.t[0]), &q(1, 2)));
        assert!(close(&s.ledger.norm_sq[1], &r(4.0)));
        assert!(close(&s.ledger.norm_sq[2], &q(89, 4)));
        let ratio = Float::with_val(PREC, &s.ledger.t[0] / &s.ledger.t[2]);
        assert!(close(&sq(&ratio), &q(89, 8)));
    }

    #[test]
    fn gamma_examples() {
        let s = example(4);
        let (g00, _, _) = gamma_connection(&s.ledger, 0).unwrap();
        assert!(close(&sq(&g00), &q(5, 2)));
        let (g11, g01, g_1) = gamma_connection(&s.ledger, 1).unwrap();
        assert!(close(&sq(&g11), &q(69, 20)));
        assert!(close(&sq(&g01), &q(121, 20)) && g01 > 0);
        assert_eq!(g_1, 0);
        assert!(gamma_connection(&s.ledger, 4).is_err());
    }

    #[test]
    fn five_term_examples() {
        let s = example(5);
        let (_, _, c0) = five_term_coeffs(&s.ledger, 0).unwrap();
        assert!(close(&c0, &q(5, 2)));
        let (_, b1, c1) = five_term_coeffs(&s.ledger, 1).unwrap();
        assert!(close(&sq(&b1), &q(121, 8)) && b1 > 0);
        assert!(close(&c1, &q(19, 2)));
        let (a2, _, c2) = five_term_coeffs(&s.ledger, 2).unwrap();
        assert!(close(&sq(&a2), &q(89, 8)) && a2 > 0);
        assert!(close(&c2, &q(5331, 178)));
        assert_eq!(s.ledger.rho(0, 3).unwrap(), 0);
    }

    #[test]
    fn rho_successor_matches_symmetric_entry() {
        // gamma_{n,n} gamma_{n,n+1} + gamma_{n-1,n} gamma_{n-1,n+1} = b_{n+1}
        let s = example(12);
        let l = &s.ledger;
        for n in 0..11 {
            let mut v = Float::with_val(PREC, &l.gamma_nn[n] * &l.gamma_n1[n + 1]);
            if n >= 1 {
                v += Float::with_val(PREC, &l.gamma_n1[n] * &l.gamma_n2[n + 1]);
            }
            assert!(rel_diff(&v, &l.b[n + 1]) < r(1e-60), "n={n}");
        }
    }

    #[test]
    fn aux_examples() {
        let s = example(4);
        let [_, a00, x00, _, _] = aux_connections(&s.ledger, 0).unwrap();
        assert!(close(&sq(&a00), &r(2.0)));
        assert!(close(&sq(&x00), &r(5.0)));
        let [_, _, x11, _, _] = aux_connections(&s.ledger, 1).unwrap();
        assert!(close(&sq(&x11), &q(69, 5)));
    }

    #[test]
    fn eval_examples() {
        let s = example(4);
        let v = eval_sobolev(&s.rec, &s.ledger, 0, &r(7.3), true).unwrap();
        assert!(close(&sq(&v), &q(1, 2)));
        let v = eval_sobolev(&s.rec, &s.ledger, 1, &r(2.0), false).unwrap();
        assert!(close(&v, &r(2.0)));
        let s = example(6);
        let res = five_term_residual(&s.rec, &s.ledger, 1, &r(3.0)).unwrap();
        assert!(res < r(1e-30));
    }

    #[test]
    fn eval_at_c_matches_boundary_values() {
        let s = example(8);
        for n in 0..8 {
            let v = eval_sobolev(&s.rec, &s.ledger, n, &r(-1.0), false).unwrap();
            assert!(rel_diff(&v, &s.ledger.sc[n]) < r(1e-50), "n={n}");
        }
    }

    #[test]
    fn connection_identities_hold_pointwise() {
        let s = example(10);
        let (rec, chris, l) = (&s.rec, &s.chris, &s.ledger);
        let c = r(-1.0);
        for x in [0.3, 1.7, 4.0, 9.5] {
            let x = r(x);
            let p2 = iterated_orthonormal_values(chris, 9, &x).unwrap();
            let pj = rec.orthonormal_jet(10, &x, 0).unwrap();
            for n in 0..10 {
                let sn = eval_sobolev(rec, l, n, &x, true).unwrap();
                // s_n = sum_k gamma_{k,n} p_k^[2]
                let mut conn = Float::with_val(PREC, &l.gamma_nn[n] * &p2[n]);
                if n >= 1 {
                    conn += Float::with_val(PREC, &l.gamma_n1[n] * &p2[n - 1]);
                }
                if n >= 2 {
                    conn += Float::with_val(PREC, &l.gamma_n2[n] * &p2[n - 2]);
                }
                assert!(rel_diff(&sn, &conn) < r(1e-40), "gamma n={n}");

                // p_n = sum_k xi_{k,n} p_k^[2]
                let mut xi = Float::with_val(PREC, &l.xi0[n] * &p2[n]);
                if n >= 1 {
                    xi += Float::with_val(PREC, &l.xi1[n] * &p2[n - 1]);
                }
                if n >= 2 {
                    xi += Float::with_val(PREC, &l.xi2[n] * &p2[n - 2]);
                }
                assert!(rel_diff(pj.value(n), &xi) < r(1e-40), "xi n={n}");

                // s_n = alpha_{n+1,n} p_{n+1} + alpha_{n,n} p_n - M s_n(c) K_{n+1}(x,c) - N s_n'(c) K^{(0,1)}_{n+1}(x,c)
                let k = kernel_at(rec, n + 1, &x, &c).unwrap();
                let kd = kernel_dy(rec, n + 1, &x, &c).unwrap();
                let mut lem = Float::with_val(PREC, &l.alpha1[n] * pj.value(n + 1));
                lem += Float::with_val(PREC, &l.alpha0[n] * pj.value(n));
                lem -= Float::with_val(PREC, &l.t[n] * &l.sc[n]) * k;
                lem -= Float::with_val(PREC, &l.t[n] * &l.sdc[n]) * kd;
                assert!(rel_diff(&sn, &lem) < r(1e-40), "alpha n={n}");
            }
        }
    }

    #[test]
    fn determinant_form_agrees() {
        let s = example(7);
        for x in [0.1, 2.2, 5.5, 8.0, 9.9] {
            let x = r(x);
            for n in 0..=6 {
                let a = eval_sobolev(&s.rec, &s.ledger, n, &x, false).unwrap();
                let b = eval_sobolev_determinant(&s.rec, &s.ledger.spec, n, &x).unwrap();
                assert!(rel_diff(&a, &b) < r(1e-40), "n={n}");
            }
        }
    }

    #[test]
    fn zero_masses_reduce_to_standard() {
        let s = setup(-1.0, 0.0, 0.0, 8, DerivativeIndexReading::Expansion);
        for n in 0..8 {
            assert!(close(&s.ledger.norm_sq[n], s.rec.norm_sq(n)));
            let v = eval_sobolev(&s.rec, &s.ledger, n, &r(2.5), true).unwrap();
            let p = crate::spectral::orthonormal_value(&s.rec, n, &r(2.5)).unwrap();
            assert!(rel_diff(&v, &p) < r(1e-50));
        }
    }

    #[test]
    fn literal_reading_breaks_expansion() {
        // With the example masses the literal system already yields a
        // nonpositive squared norm at degree 2.
        let base = MeasureSpec::laguerre(r(0.0)).unwrap();
        let spec = SobolevSpec::new(base, r(-1.0), r(1.0), r(1.0)).unwrap();
        let rec = spec.base.recurrence(8).unwrap();
        let chris = ChristoffelLedger::build(&rec, &spec.c, 5).unwrap();
        let lit = SobolevLedger::build(&rec, &chris, &spec, 4, DerivativeIndexReading::Literal);
        assert!(matches!(lit, Err(Error::NumericalFailure(_))));

        // Without a derivative mass both readings coincide.
        let a = setup(-1.0, 1.0, 0.0, 6, DerivativeIndexReading::Expansion);
        let b = setup(-1.0, 1.0, 0.0, 6, DerivativeIndexReading::Literal);
        for n in 0..6 {
            assert!(close(&a.ledger.norm_sq[n], &b.ledger.norm_sq[n]));
        }

        // A small derivative mass lets the literal ledger build, but its
        // polynomials violate the five-term recurrence.
        let l = setup(-1.0, 1.0, 0.01, 4, DerivativeIndexReading::Literal);
        let res = five_term_residual(&l.rec, &l.ledger, 1, &r(3.0)).unwrap();
        assert!(res > r(1e-10));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ledger_positivity(c in -5.0f64..-0.05, m in 0.0f64..10.0, nm in 0.0f64..10.0) {
            let s = setup(c, m, nm, 10, DerivativeIndexReading::Expansion);
            for n in 0..10 {
                prop_assert!(s.ledger.norm_sq[n] > 0 && s.ledger.t[n] > 0);
                prop_assert!(s.ledger.gamma_nn[n] > 0);
                if n >= 2 {
                    let ratio = Float::with_val(PREC, &s.ledger.t[n - 2] / &s.ledger.t[n]);
                    prop_assert!(s.ledger.a[n] > 0);
                    prop_assert!(rel_diff(&ratio, &s.ledger.a[n]) < r(1e-50));
                }
            }
        }

        #[test]
        fn five_term_recurrence_holds(x in 0.0f64..20.0, c in -3.0f64..-0.1, m in 0.0f64..4.0, nm in 0.0f64..4.0) {
            let s = setup(c, m, nm, 10, DerivativeIndexReading::Expansion);
            for n in 0..8 {
                prop_assert!(five_term_residual(&s.rec, &s.ledger, n, &r(x)).unwrap() < r(1e-30));
            }
        }
    }
}
