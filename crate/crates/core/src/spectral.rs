//! Base measures and their standard orthogonal systems.
//!
//! A [`MeasureSpec`] describes a positive measure on the real line either by a
//! classical family (Laguerre) or by caller-supplied monic recurrence
//! coefficients. [`RecurrenceTable`] holds the monic three-term recurrence
//! `x P_n = P_{n+1} + beta_n P_n + gamma_n P_{n-1}` together with the squared
//! norms `||P_n||^2` and the orthonormal leading coefficients `r_n = 1/||P_n||`.

use rug::{Float, Rational};

use crate::error::{check_index, Error, Result};
use crate::real::{self, Real, MIN_PRECISION};

/// Which side of the support a point sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Below the infimum of the support: `J - cI` is positive definite.
    Left,
    /// Above the supremum of the support: `cI - J` is positive definite.
    Right,
}

impl Side {
    /// `+1` for [`Side::Left`], `-1` for [`Side::Right`]; the sign that makes
    /// `sign * (x - c)` positive on the support.
    pub fn sign(self) -> i32 {
        match self {
            Side::Left => 1,
            Side::Right => -1,
        }
    }
}

/// Closed interval hull of the support; `None` endpoints are infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    pub lower: Option<Real>,
    pub upper: Option<Real>,
}

impl Support {
    pub fn new(lower: Option<Real>, upper: Option<Real>) -> Result<Self> {
        if let (Some(a), Some(b)) = (&lower, &upper) {
            if a >= b {
                return Err(Error::InvalidParameter(format!(
                    "support endpoints must satisfy a < b (got {a} and {b})"
                )));
            }
        }
        Ok(Support { lower, upper })
    }

    pub fn half_line(lower: Real) -> Self {
        Support {
            lower: Some(lower),
            upper: None,
        }
    }

    pub fn contains(&self, x: &Real) -> bool {
        let above_lower = self.lower.as_ref().is_none_or(|a| x >= a);
        let below_upper = self.upper.as_ref().is_none_or(|b| x <= b);
        above_lower && below_upper
    }

    /// Side of the support on which `c` lies, or an error if `c` is inside.
    pub fn side_of(&self, c: &Real) -> Result<Side> {
        if let Some(a) = &self.lower {
            if c < a {
                return Ok(Side::Left);
            }
        }
        if let Some(b) = &self.upper {
            if c > b {
                return Ok(Side::Right);
            }
        }
        Err(Error::InvalidParameter(format!(
            "mass point c = {} lies in the support of the measure",
            c.to_f64()
        )))
    }
}

/// Monic recurrence data supplied by the caller for a custom measure.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomRecurrence {
    pub beta: Vec<Real>,
    /// `gamma[0]` is ignored; `gamma[n] > 0` for `n >= 1`.
    pub gamma: Vec<Real>,
    /// Total mass `mu_0 = ||P_0||^2`.
    pub mass: Real,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureFamily {
    /// `x^alpha e^{-x} dx` on `(0, inf)`.
    Laguerre { alpha: Real },
    Custom(CustomRecurrence),
}

/// Where exact moments come from, for the rational oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentSource {
    /// `mu_n = (n + alpha)!`, available for nonnegative integer `alpha`.
    LaguerreFactorial,
    Supplied(Vec<Rational>),
    Unavailable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub family: MeasureFamily,
    pub support: Support,
    pub moments: MomentSource,
    prec: u32,
}

impl MeasureSpec {
    /// Laguerre weight `x^alpha e^{-x}`; the precision of `alpha` becomes the
    /// working precision of everything derived from this measure.
    pub fn laguerre(alpha: Real) -> Result<Self> {
        let prec = alpha.prec();
        check_precision(prec)?;
        if alpha <= -1 {
            return Err(Error::InvalidParameter(format!(
                "Laguerre parameter must satisfy alpha > -1 (got {})",
                alpha.to_f64()
            )));
        }
        Ok(MeasureSpec {
            family: MeasureFamily::Laguerre { alpha },
            support: Support::half_line(real::zero(prec)),
            moments: MomentSource::LaguerreFactorial,
            prec,
        })
    }

    pub fn custom(
        recurrence: CustomRecurrence,
        support: Support,
        moments: Option<Vec<Rational>>,
    ) -> Result<Self> {
        let prec = recurrence.mass.prec();
        check_precision(prec)?;
        if recurrence.beta.is_empty() || recurrence.beta.len() != recurrence.gamma.len() {
            return Err(Error::InvalidParameter(
                "custom recurrence needs equally long, nonempty beta and gamma".into(),
            ));
        }
        // Validates positivity of gamma and mass.
        RecurrenceTable::from_coefficients(
            recurrence.beta.clone(),
            recurrence.gamma.clone(),
            recurrence.mass.clone(),
        )?;
        Ok(MeasureSpec {
            family: MeasureFamily::Custom(recurrence),
            support,
            moments: moments.map_or(MomentSource::Unavailable, MomentSource::Supplied),
            prec,
        })
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Recurrence table with indices `0..size`.
    pub fn recurrence(&self, size: usize) -> Result<RecurrenceTable> {
        match &self.family {
            MeasureFamily::Laguerre { alpha } => laguerre_recurrence(alpha, size),
            MeasureFamily::Custom(rec) => {
                if size > rec.beta.len() {
                    return Err(Error::InvalidParameter(format!(
                        "custom recurrence supplies {} coefficients, {} requested",
                        rec.beta.len(),
                        size
                    )));
                }
                RecurrenceTable::from_coefficients(
                    rec.beta[..size].to_vec(),
                    rec.gamma[..size].to_vec(),
                    rec.mass.clone(),
                )
            }
        }
    }
}

pub(crate) fn check_precision(prec: u32) -> Result<()> {
    if prec < MIN_PRECISION {
        return Err(Error::InvalidParameter(format!(
            "precision must be at least {MIN_PRECISION} bits (got {prec})"
        )));
    }
    Ok(())
}

/// Monic three-term recurrence coefficients with norms and leading coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    beta: Vec<Real>,
    gamma: Vec<Real>,
    norm_sq: Vec<Real>,
    leading: Vec<Real>,
}

impl RecurrenceTable {
    pub fn from_coefficients(beta: Vec<Real>, mut gamma: Vec<Real>, mass: Real) -> Result<Self> {
        let size = beta.len();
        if size == 0 || gamma.len() != size {
            return Err(Error::InvalidParameter(
                "recurrence table needs equally long, nonempty beta and gamma".into(),
            ));
        }
        if mass <= 0 {
            return Err(Error::InvalidParameter("total mass must be positive".into()));
        }
        let prec = mass.prec();
        gamma[0] = real::zero(prec);
        let mut norm_sq = Vec::with_capacity(size);
        norm_sq.push(mass);
        for n in 1..size {
            if gamma[n] <= 0 {
                return Err(Error::InvalidParameter(format!(
                    "gamma_{n} must be positive (got {})",
                    gamma[n].to_f64()
                )));
            }
            let next = Float::with_val(prec, &norm_sq[n - 1] * &gamma[n]);
            norm_sq.push(next);
        }
        let leading = norm_sq
            .iter()
            .map(|v| Float::with_val(prec, v.sqrt_ref()).recip())
            .collect();
        Ok(RecurrenceTable {
            beta,
            gamma,
            norm_sq,
            leading,
        })
    }

    pub fn size(&self) -> usize {
        self.beta.len()
    }

    pub fn prec(&self) -> u32 {
        self.norm_sq[0].prec()
    }

    pub fn beta(&self, n: usize) -> &Real {
        &self.beta[n]
    }

    /// `gamma_n`; zero for `n = 0`.
    pub fn gamma(&self, n: usize) -> &Real {
        &self.gamma[n]
    }

    /// `||P_n||^2` with respect to the base measure.
    pub fn norm_sq(&self, n: usize) -> &Real {
        &self.norm_sq[n]
    }

    /// `r_n = 1/||P_n||`, the leading coefficient of the orthonormal `p_n`.
    pub fn leading(&self, n: usize) -> &Real {
        &self.leading[n]
    }

    /// Monic values and derivatives of `P_0..=P_n` at `x`.
    pub fn jet(&self, n: usize, x: &Real, order: usize) -> Result<PolyJet> {
        eval_jet(self, n, x, order)
    }

    /// Same as [`RecurrenceTable::jet`] but for the orthonormal `p_k = r_k P_k`.
    pub fn orthonormal_jet(&self, n: usize, x: &Real, order: usize) -> Result<PolyJet> {
        let mut jet = eval_jet(self, n, x, order)?;
        for (k, row) in jet.rows.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v *= &self.leading[k];
            }
        }
        Ok(jet)
    }
}

/// Monic Laguerre recurrence: `beta_n = 2n + 1 + alpha`, `gamma_n = n (n + alpha)`,
/// `||P_0||^2 = Gamma(alpha + 1)`.
pub fn laguerre_recurrence(alpha: &Real, size: usize) -> Result<RecurrenceTable> {
    let prec = alpha.prec();
    check_precision(prec)?;
    if *alpha <= -1 {
        return Err(Error::InvalidParameter(format!(
            "Laguerre parameter must satisfy alpha > -1 (got {})",
            alpha.to_f64()
        )));
    }
    if size == 0 {
        return Err(Error::InvalidParameter("recurrence size must be at least 1".into()));
    }
    let beta = (0..size)
        .map(|n| Float::with_val(prec, alpha + (2 * n + 1) as u64))
        .collect();
    let gamma = (0..size)
        .map(|n| {
            let n_plus_alpha = Float::with_val(prec, alpha + n as u64);
            Float::with_val(prec, n_plus_alpha * n as u64)
        })
        .collect();
    let mass = Float::with_val(prec, alpha + 1u32).gamma();
    RecurrenceTable::from_coefficients(beta, gamma, mass)
}

/// Highest derivative order carried by a [`PolyJet`].
pub const MAX_JET_ORDER: usize = 3;

/// Values and derivatives of a polynomial family at one point:
/// `derivative(k, j) = d^j P_k / dx^j (x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyJet {
    order: usize,
    rows: Vec<Vec<Real>>,
}

impl PolyJet {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Highest polynomial index held.
    pub fn degree(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn value(&self, k: usize) -> &Real {
        &self.rows[k][0]
    }

    pub fn derivative(&self, k: usize, j: usize) -> &Real {
        &self.rows[k][j]
    }
}

/// Evaluates `P_0..=P_n` and their first `order` derivatives at `x` through the
/// recurrence differentiated `j` times:
/// `P^{(j)}_{k+1} = (x - beta_k) P^{(j)}_k + j P^{(j-1)}_k - gamma_k P^{(j)}_{k-1}`.
pub fn eval_jet(rec: &RecurrenceTable, n: usize, x: &Real, order: usize) -> Result<PolyJet> {
    check_index(n, rec.size())?;
    if order > MAX_JET_ORDER {
        return Err(Error::InvalidParameter(format!(
            "derivative order {order} exceeds {MAX_JET_ORDER}"
        )));
    }
    let prec = rec.prec();
    let mut rows: Vec<Vec<Real>> = Vec::with_capacity(n + 1);
    let mut first = vec![real::zero(prec); order + 1];
    first[0] = real::one(prec);
    rows.push(first);
    for k in 0..n {
        let shift = Float::with_val(prec, x - rec.beta(k));
        let mut next = Vec::with_capacity(order + 1);
        for j in 0..=order {
            let mut v = Float::with_val(prec, &shift * &rows[k][j]);
            if j > 0 {
                v += Float::with_val(prec, &rows[k][j - 1] * j as u32);
            }
            if k > 0 {
                v -= Float::with_val(prec, rec.gamma(k) * &rows[k - 1][j]);
            }
            next.push(v);
        }
        rows.push(next);
    }
    Ok(PolyJet { order, rows })
}

/// Orthonormal value `p_n(x) = r_n P_n(x)`.
pub fn orthonormal_value(rec: &RecurrenceTable, n: usize, x: &Real) -> Result<Real> {
    let jet = eval_jet(rec, n, x, 0)?;
    Ok(Float::with_val(rec.prec(), jet.value(n) * rec.leading(n)))
}
