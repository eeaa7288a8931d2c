//! Once- and twice-iterated Christoffel transforms of the base measure,
//! `(x - c) dmu` and `(x - c)^2 dmu`.
//!
//! The twice-iterated monic family satisfies
//! `(x - c)^2 P_n^[2](x) = P_{n+2}(x) - d_n P_{n+1}(x) + e_n P_n(x)`, and its
//! orthonormal version `p_n^[2]` (leading coefficient `r_n^[2]`) obeys a
//! three-term recurrence with coefficients `kappa_n`, `tau_n`. Every quantity
//! with two published routes is computed both ways and the pair is kept in the
//! ledger, so tests and the verification report can compare them.

use rug::Float;

use crate::error::{check_index, Error, Result};
use crate::kernels::kernel_sum;
use crate::real::{self, consistency_tolerance, rel_diff, Real};
use crate::spectral::{eval_jet, RecurrenceTable};

/// Scalars of the twice-iterated transform for indices `0..size`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelLedger {
    c: Real,
    /// `p_n(c)` for `n <= size + 1`
    pub pc: Vec<Real>,
    /// `K_n(c, c)` for `n <= size`
    pub kcc: Vec<Real>,
    /// `d_n` from the 2x2 determinant quotient.
    pub d: Vec<Real>,
    /// `d_n` from the kernel form.
    pub d_kernel: Vec<Real>,
    /// `e_n` from the determinant quotient.
    pub e: Vec<Real>,
    /// `e_n = (r_n / r_{n+1})^2 K_{n+1}(c,c) / K_n(c,c)`.
    pub e_kernel: Vec<Real>,
    /// `r_n^[2] = r_{n+1} (K_n(c,c) / K_{n+1}(c,c))^{1/2}`.
    pub r2: Vec<Real>,
    /// `kappa_n` by the explicit orthonormal-ratio formula.
    pub kappa: Vec<Real>,
    /// `kappa_n` by the `d_{n-1}/e_{n-1}` form.
    pub kappa_alt: Vec<Real>,
    /// `tau_n = (r_{n-1}^[2] / r_n^[2])^2`; `tau_0 = ||P_0^[2]||^2_[2]`.
    pub tau: Vec<Real>,
    /// `tau_n = (r_{n-1}^[2] / r_{n+1})^2 K_{n+1}(c,c) / K_n(c,c)`; `tau_0` as above.
    pub tau_kernel: Vec<Real>,
    /// `||P_n^[2]||^2_[2] = e_n ||P_n||^2`.
    pub norm2_sq: Vec<Real>,
}

impl ChristoffelLedger {
    /// Fills indices `0..size`. The table must hold at least `size + 2` entries.
    pub fn build(rec: &RecurrenceTable, c: &Real, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("ledger size must be at least 1".into()));
        }
        check_index(size + 1, rec.size())?;
        let prec = rec.prec();
        let top = size + 1;
        let jet = eval_jet(rec, top, c, 1)?;

        let pc: Vec<Real> = (0..=top)
            .map(|k| Float::with_val(prec, jet.value(k) * rec.leading(k)))
            .collect();
        for (n, v) in pc.iter().enumerate() {
            if v.is_zero() {
                return Err(Error::DegeneratePoint {
                    n,
                    what: "p_n(c) vanishes".into(),
                });
            }
        }
        let mut kcc = Vec::with_capacity(size + 1);
        let mut acc = real::zero(prec);
        for v in pc.iter().take(size + 1) {
            acc += Float::with_val(prec, v.square_ref());
            kcc.push(acc.clone());
        }

        let r = |k: usize| rec.leading(k);
        let ratio = |a: &Real, b: &Real| Float::with_val(prec, a / b);
        let tol = consistency_tolerance(prec);

        let mut d = Vec::with_capacity(size);
        let mut d_kernel = Vec::with_capacity(size);
        let mut e = Vec::with_capacity(size);
        let mut e_kernel = Vec::with_capacity(size);
        let mut r2 = Vec::with_capacity(size);
        let mut norm2_sq = Vec::with_capacity(size);
        for n in 0..size {
            // Wronskian-like minors at c.
            let minor = |i: usize, j: usize| {
                let mut v = Float::with_val(prec, jet.value(i) * jet.derivative(j, 1));
                v -= Float::with_val(prec, jet.derivative(i, 1) * jet.value(j));
                v
            };
            let den = minor(n + 1, n);
            if den.is_zero() {
                return Err(Error::DegeneratePoint {
                    n,
                    what: "determinant P_{n+1}(c)P_n'(c) - P_{n+1}'(c)P_n(c) vanishes".into(),
                });
            }
            let dn = minor(n + 2, n) / &den;
            let en = minor(n + 2, n + 1) / &den;

            let k_ratio = ratio(&kcc[n + 1], &kcc[n]);
            let rn_over_rn1 = ratio(r(n), r(n + 1));
            let en_kernel = Float::with_val(prec, rn_over_rn1.square_ref()) * &k_ratio;
            let mut dn_kernel = ratio(r(n + 1), r(n + 2)) * ratio(&pc[n + 2], &pc[n + 1]);
            dn_kernel += rn_over_rn1 * ratio(&pc[n], &pc[n + 1]) * &k_ratio;

            if rel_diff(&en, &en_kernel) > tol {
                return Err(Error::NumericalFailure(format!(
                    "e_{n}: determinant ({}) and kernel-ratio ({}) routes disagree",
                    en.to_f64(),
                    en_kernel.to_f64()
                )));
            }
            if en <= 0 {
                return Err(Error::NumericalFailure(format!("e_{n} is not positive")));
            }
            if rel_diff(&dn, &dn_kernel) > tol {
                return Err(Error::NumericalFailure(format!(
                    "d_{n}: determinant and kernel routes disagree"
                )));
            }

            let r2n = Float::with_val(prec, r(n + 1) * real::sqrt(&ratio(&kcc[n], &kcc[n + 1])));
            norm2_sq.push(Float::with_val(prec, &en * rec.norm_sq(n)));
            d.push(dn);
            d_kernel.push(dn_kernel);
            e.push(en);
            e_kernel.push(en_kernel);
            r2.push(r2n);
        }

        let mut kappa = Vec::with_capacity(size);
        let mut kappa_alt = Vec::with_capacity(size);
        let mut tau = Vec::with_capacity(size);
        let mut tau_kernel = Vec::with_capacity(size);
        for n in 0..size {
            // kappa_n = beta_n + gamma_n [ (r2_{n-1}/r_{n-1})^2 (r_n/r_{n+1}) p_{n+1}(c)/p_n(c)
            //                              + (r_n/r_{n-1}) p_{n-1}(c)/p_n(c) ]
            //         - [ r2_n^2/(r_{n+1} r_{n+2}) p_{n+2}(c)/p_{n+1}(c) + (r_n/r_{n+1}) p_n(c)/p_{n+1}(c) ]
            let mut kap = rec.beta(n).clone();
            if n > 0 {
                let q = ratio(&r2[n - 1], r(n - 1));
                let mut inner = Float::with_val(prec, q.square_ref())
                    * ratio(r(n), r(n + 1))
                    * ratio(&pc[n + 1], &pc[n]);
                inner += ratio(r(n), r(n - 1)) * ratio(&pc[n - 1], &pc[n]);
                kap += inner * rec.gamma(n);
            }
            let mut tail = Float::with_val(prec, r2[n].square_ref())
                / Float::with_val(prec, r(n + 1) * r(n + 2))
                * ratio(&pc[n + 2], &pc[n + 1]);
            tail += ratio(r(n), r(n + 1)) * ratio(&pc[n], &pc[n + 1]);
            kap -= tail;
            kappa.push(kap);

            // (beta_n + gamma_n d_{n-1}/e_{n-1}) e_n (r2_n/r_n)^2 - d_n (r2_n/r_{n+1})^2
            let mut lead = rec.beta(n).clone();
            if n > 0 {
                lead += Float::with_val(prec, rec.gamma(n) * ratio(&d[n - 1], &e[n - 1]));
            }
            let a = ratio(&r2[n], r(n));
            let b = ratio(&r2[n], r(n + 1));
            let alt = lead * &e[n] * Float::with_val(prec, a.square_ref())
                - Float::with_val(prec, &d[n] * Float::with_val(prec, b.square_ref()));
            kappa_alt.push(alt);

            if n == 0 {
                tau.push(norm2_sq[0].clone());
                tau_kernel.push(norm2_sq[0].clone());
            } else {
                let q = ratio(&r2[n - 1], &r2[n]);
                tau.push(Float::with_val(prec, q.square_ref()));
                let qk = ratio(&r2[n - 1], r(n + 1));
                tau_kernel.push(
                    Float::with_val(prec, qk.square_ref()) * ratio(&kcc[n + 1], &kcc[n]),
                );
            }
            if tau[n] <= 0 {
                return Err(Error::NumericalFailure(format!("tau_{n} is not positive")));
            }
            if rel_diff(&tau[n], &tau_kernel[n]) > tol || rel_diff(&kappa[n], &kappa_alt[n]) > tol
            {
                return Err(Error::NumericalFailure(format!(
                    "recurrence coefficients at n = {n} disagree between routes"
                )));
            }
        }

        Ok(ChristoffelLedger {
            c: c.clone(),
            pc,
            kcc,
            d,
            d_kernel,
            e,
            e_kernel,
            r2,
            kappa,
            kappa_alt,
            tau,
            tau_kernel,
            norm2_sq,
        })
    }

    pub fn size(&self) -> usize {
        self.d.len()
    }

    pub fn c(&self) -> &Real {
        &self.c
    }

    pub fn prec(&self) -> u32 {
        self.c.prec()
    }
}

/// `(d_n, e_n)` of the connection `(x-c)^2 P_n^[2] = P_{n+2} - d_n P_{n+1} + e_n P_n`.
pub fn christoffel_coeffs(rec: &RecurrenceTable, c: &Real, n: usize) -> Result<(Real, Real)> {
    let ledger = ChristoffelLedger::build(rec, c, n + 1)?;
    Ok((ledger.d[n].clone(), ledger.e[n].clone()))
}

/// Leading coefficient `r_n^[2]` of the twice-iterated orthonormal polynomial.
pub fn iterated_leading(rec: &RecurrenceTable, c: &Real, n: usize) -> Result<Real> {
    let ledger = ChristoffelLedger::build(rec, c, n + 1)?;
    Ok(ledger.r2[n].clone())
}

/// `(kappa_n, tau_n)` of `x P_n^[2] = P_{n+1}^[2] + kappa_n P_n^[2] + tau_n P_{n-1}^[2]`.
pub fn iterated_recurrence(ledger: &ChristoffelLedger, n: usize) -> Result<(Real, Real)> {
    check_index(n, ledger.size())?;
    Ok((ledger.kappa[n].clone(), ledger.tau[n].clone()))
}

/// Monic kernel polynomial `P_n^[1](x)`, orthogonal for `(x - c) dmu`.
pub fn eval_once_iterated(rec: &RecurrenceTable, c: &Real, n: usize, x: &Real) -> Result<Real> {
    check_index(n + 1, rec.size())?;
    let prec = rec.prec();
    let jx = eval_jet(rec, n + 1, x, 0)?;
    let jc = eval_jet(rec, n + 1, c, 0)?;
    if jc.value(n).is_zero() {
        return Err(Error::DegeneratePoint {
            n,
            what: "P_n(c) vanishes".into(),
        });
    }
    let h = Float::with_val(prec, x - c);
    let far = {
        let mut scale = real::one(prec);
        scale += real::abs(x);
        scale += real::abs(c);
        scale *= 1e-8;
        real::abs(&h) > scale
    };
    if far {
        let ratio = Float::with_val(prec, jc.value(n + 1) / jc.value(n));
        let num = Float::with_val(prec, jx.value(n + 1) - ratio * jx.value(n));
        Ok(num / h)
    } else {
        // ||P_n||^2 / P_n(c) * K_n(x, c)
        let k = kernel_sum(rec, n, x, c)?;
        Ok(k * rec.norm_sq(n) / jc.value(n))
    }
}

/// `p_0^[2..n]` at `x` through the orthonormal three-term recurrence
/// `sqrt(tau_{k+1}) p_{k+1}^[2] = (x - kappa_k) p_k^[2] - sqrt(tau_k) p_{k-1}^[2]`.
pub fn iterated_orthonormal_values(ledger: &ChristoffelLedger, n: usize, x: &Real) -> Result<Vec<Real>> {
    check_index(n, ledger.size())?;
    let prec = ledger.prec();
    let mut out = Vec::with_capacity(n + 1);
    out.push(real::sqrt(&ledger.tau[0]).recip());
    for k in 0..n {
        let mut next = Float::with_val(prec, x - &ledger.kappa[k]) * &out[k];
        if k > 0 {
            next -= real::sqrt(&ledger.tau[k]) * &out[k - 1];
        }
        next /= real::sqrt(&ledger.tau[k + 1]);
        out.push(next);
    }
    Ok(out)
}

/// `p_n^[2](x)` from the connection with `p_n, p_{n+1}, p_{n+2}`; undefined at `x = c`.
pub fn iterated_orthonormal_connection(
    rec: &RecurrenceTable,
    ledger: &ChristoffelLedger,
    n: usize,
    x: &Real,
) -> Result<Real> {
    check_index(n, ledger.size())?;
    let prec = rec.prec();
    let h = Float::with_val(prec, x - ledger.c());
    if h.is_zero() {
        return Err(Error::Domain("connection form is singular at x = c".into()));
    }
    let jet = rec.orthonormal_jet(n + 2, x, 0)?;
    let r2 = &ledger.r2[n];
    let mut acc = Float::with_val(prec, r2 / rec.leading(n + 2)) * jet.value(n + 2);
    acc -= Float::with_val(prec, r2 / rec.leading(n + 1)) * &ledger.d[n] * jet.value(n + 1);
    acc += Float::with_val(prec, r2 / rec.leading(n)) * &ledger.e[n] * jet.value(n);
    Ok(acc / Float::with_val(prec, h.square_ref()))
}

/// `P_n^[1](x)` for `k = 1`, `p_n^[2](x)` for `k = 2`.
///
/// For `k = 2` the recurrence value is returned; away from `c` it is checked
/// against the connection form and a disagreement is reported as a numerical
/// failure.
pub fn eval_iterated(
    rec: &RecurrenceTable,
    ledger: &ChristoffelLedger,
    n: usize,
    x: &Real,
    k: u32,
) -> Result<Real> {
    match k {
        1 => eval_once_iterated(rec, ledger.c(), n, x),
        2 => {
            let values = iterated_orthonormal_values(ledger, n, x)?;
            let value = values[n].clone();
            let prec = rec.prec();
            let h = real::abs(&Float::with_val(prec, x - ledger.c()));
            if h > 1e-8 {
                let conn = iterated_orthonormal_connection(rec, ledger, n, x)?;
                // Cancellation in the connection form grows like 1/(x-c)^2.
                let mut tol = consistency_tolerance(prec);
                tol /= Float::with_val(prec, h.square_ref()).min(&real::one(prec));
                let diff = real::abs(&Float::with_val(prec, &conn - &value));
                if diff > tol * Float::with_val(prec, real::abs(&value) + 1u32) {
                    return Err(Error::NumericalFailure(format!(
                        "p_{n}^[2]({}) differs between recurrence and connection",
                        x.to_f64()
                    )));
                }
            }
            Ok(value)
        }
        _ => Err(Error::InvalidParameter(format!(
            "only once- and twice-iterated transforms are supported (k = {k})"
        ))),
    }
}

/// Monic `P_n^[2](x) = p_n^[2](x) / r_n^[2]`.
pub fn eval_iterated_monic(ledger: &ChristoffelLedger, n: usize, x: &Real) -> Result<Real> {
    let values = iterated_orthonormal_values(ledger, n, x)?;
    Ok(Float::with_val(ledger.prec(), &values[n] / &ledger.r2[n]))
}
