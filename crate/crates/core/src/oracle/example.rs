//! Exact orthogonal systems for one Sobolev spec and the matrices built from
//! them, every entry written as a normalized inner product:
//!
//! ```text
//! J_ij   = <x P_i, P_j>                     L_in  = <s(x-c) P1_n, P_i>
//! J1_ij  = <x P1_i, P1_j>_[1]               L1_in = <s(x-c) P2_n, P1_i>_[1]
//! J2_ij  = <x P2_i, P2_j>_[2]               Q_ij  = <s(x-c) P2_j, P_i>
//! R_ij   = <(x-c)^2 P2_i, P_j>              T_nk  = <S_n, P2_k>_[2]
//! H_kn   = <(x-c)^2 S_n, S_k>_S             (J2-cI)^2_ij = <(x-c)^2 P2_i, P2_j>_[2]
//! ```
//!
//! each divided by the norms of its two arguments in their own products;
//! `s = +-1` is the side of `c`.

use std::cmp::Ordering;

use rug::Rational;

use super::{gram_schmidt, measure_moments, FunctionalKind, MomentFunctional, RatPoly, RationalPolySystem, SquaredEntry};
use crate::error::{Error, Result};
use crate::sobolev::SobolevSpec;

/// Exact data of a Sobolev spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSobolev {
    pub moments: Vec<Rational>,
    pub c: Rational,
    pub m: Rational,
    pub n: Rational,
    pub sigma: i32,
}

/// Moments needed for systems through `degree`.
pub fn moment_count(degree: usize) -> usize {
    2 * degree + 4
}

impl ExactSobolev {
    /// Uses the binary values of `c`, `M`, `N` exactly.
    pub fn from_spec(spec: &SobolevSpec, degree: usize) -> Result<Self> {
        let exact = |v: &rug::Float, what: &str| {
            v.to_rational()
                .ok_or_else(|| Error::InvalidParameter(format!("{what} is not finite")))
        };
        Ok(ExactSobolev {
            moments: measure_moments(&spec.base, moment_count(degree))?,
            c: exact(&spec.c, "c")?,
            m: exact(&spec.point_mass, "M")?,
            n: exact(&spec.derivative_mass, "N")?,
            sigma: spec.side().sign(),
        })
    }

    pub fn functional(&self, kind: FunctionalKind) -> MomentFunctional {
        MomentFunctional::new(kind, self.moments.clone())
    }

    pub fn standard(&self) -> MomentFunctional {
        self.functional(FunctionalKind::Standard)
    }

    pub fn iterated(&self, k: u32) -> MomentFunctional {
        self.functional(FunctionalKind::Iterated {
            k,
            c: self.c.clone(),
            sigma: self.sigma,
        })
    }

    pub fn sobolev(&self) -> MomentFunctional {
        self.functional(FunctionalKind::Sobolev {
            c: self.c.clone(),
            m: self.m.clone(),
            n: self.n.clone(),
        })
    }

    pub fn systems(&self, degree: usize) -> Result<ExactSystems> {
        if self.moments.len() < moment_count(degree) {
            return Err(Error::UnsupportedByOracle(format!(
                "systems through degree {degree} need {} moments",
                moment_count(degree)
            )));
        }
        let (f0, f1, f2, fs) = (self.standard(), self.iterated(1), self.iterated(2), self.sobolev());
        Ok(ExactSystems {
            standard: gram_schmidt(&f0, degree)?,
            once: gram_schmidt(&f1, degree)?,
            twice: gram_schmidt(&f2, degree)?,
            sobolev: gram_schmidt(&fs, degree)?,
            functionals: [f0, f1, f2, fs],
            c: self.c.clone(),
            sigma: self.sigma,
        })
    }
}

/// The four monic families `P`, `P^[1]`, `P^[2]`, `S` with their products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSystems {
    pub standard: RationalPolySystem,
    pub once: RationalPolySystem,
    pub twice: RationalPolySystem,
    pub sobolev: RationalPolySystem,
    /// Standard, `[1]`, `[2]`, Sobolev.
    pub functionals: [MomentFunctional; 4],
    pub c: Rational,
    pub sigma: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Standard,
    Once,
    Twice,
    Sobolev,
}

impl ExactSystems {
    pub fn degree(&self) -> usize {
        self.standard.degree()
    }

    pub fn system(&self, f: Family) -> &RationalPolySystem {
        match f {
            Family::Standard => &self.standard,
            Family::Once => &self.once,
            Family::Twice => &self.twice,
            Family::Sobolev => &self.sobolev,
        }
    }

    pub fn functional(&self, f: Family) -> &MomentFunctional {
        &self.functionals[f as usize]
    }

    /// Gram matrix of a family under its own product, degrees `0..=deg`.
    pub fn gram(&self, f: Family, deg: usize) -> Result<Vec<Vec<Rational>>> {
        let sys = self.system(f);
        let fun = self.functional(f);
        (0..=deg)
            .map(|i| (0..=deg).map(|j| fun.pair(&sys.polys[i], &sys.polys[j])).collect())
            .collect()
    }

    fn lin(&self) -> RatPoly {
        // s (x - c)
        let s = Rational::from(self.sigma);
        RatPoly::shift_power(&self.c, 1).scale(&s)
    }

    fn quad(&self) -> RatPoly {
        RatPoly::shift_power(&self.c, 2)
    }

    /// `<w A_a, B_b>_F / (|A_a| |B_b|)`, norms in the families' own products.
    fn entry(&self, w: &RatPoly, fa: Family, a: usize, fb: Family, b: usize, prod: Family) -> Result<SquaredEntry> {
        let pa = &self.system(fa).polys[a];
        let pb = &self.system(fb).polys[b];
        let num = self.functional(prod).pair(&w.mul(pa), pb)?;
        Ok(SquaredEntry::from_inner(
            &num,
            &self.system(fa).norms[a],
            &self.system(fb).norms[b],
        ))
    }

    /// Leading `rows x cols` block of a named matrix in squared form. Names:
    /// `J`, `J1`, `J2`, `L`, `L1`, `Q`, `R`, `T`, `H`, `J2sq`.
    pub fn matrix(&self, name: &str, rows: usize, cols: usize) -> Result<Vec<Vec<SquaredEntry>>> {
        // Indices run to `rows - 1`, `cols - 1`.
        let need = rows.max(cols).saturating_sub(1);
        if need > self.degree() {
            return Err(Error::UnsupportedByOracle(format!(
                "{rows}x{cols} block needs systems through degree {need}"
            )));
        }
        let x = RatPoly::monomial(1);
        let one = RatPoly::constant(Rational::from(1));
        let (lin, quad) = (self.lin(), self.quad());
        use Family::*;
        let mut out = Vec::with_capacity(rows);
        for i in 0..rows {
            let mut row = Vec::with_capacity(cols);
            for j in 0..cols {
                let e = match name {
                    "J" => self.entry(&x, Standard, i, Standard, j, Standard)?,
                    "J1" => self.entry(&x, Once, i, Once, j, Once)?,
                    "J2" => self.entry(&x, Twice, i, Twice, j, Twice)?,
                    "L" => self.entry(&lin, Once, j, Standard, i, Standard)?,
                    "L1" => self.entry(&lin, Twice, j, Once, i, Once)?,
                    "Q" => self.entry(&lin, Twice, j, Standard, i, Standard)?,
                    "R" => self.entry(&quad, Twice, i, Standard, j, Standard)?,
                    "T" => self.entry(&one, Sobolev, i, Twice, j, Twice)?,
                    "H" => self.entry(&quad, Sobolev, j, Sobolev, i, Sobolev)?,
                    "J2sq" => self.entry(&quad, Twice, i, Twice, j, Twice)?,
                    other => {
                        return Err(Error::InvalidParameter(format!("unknown matrix {other:?}")))
                    }
                };
                row.push(e);
            }
            out.push(row);
        }
        Ok(out)
    }
}

/// True when every off-diagonal entry is exactly zero.
pub fn is_diagonal(gram: &[Vec<Rational>]) -> bool {
    gram.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, v)| i == j || v.cmp0() == Ordering::Equal)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::from_f64;
    use crate::spectral::MeasureSpec;

    fn example() -> ExactSystems {
        let base = MeasureSpec::laguerre(from_f64(256, 0.0)).unwrap();
        let spec = SobolevSpec::new(base, from_f64(256, -1.0), from_f64(256, 1.0), from_f64(256, 1.0)).unwrap();
        ExactSobolev::from_spec(&spec, 7).unwrap().systems(7).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn matrix_entries() {
        let sys = example();
        let h = sys.matrix("H", 3, 3).unwrap();
        assert_eq!(h[0][0].square, q(25, 4));
        assert_eq!((h[0][1].square.clone(), h[0][1].sign), (q(121, 8), 1));
        let qm = sys.matrix("Q", 2, 1).unwrap();
        assert_eq!(qm[0][0].square, q(4, 5));
        assert_eq!(qm[1][0].square, q(1, 5));
        let t = sys.matrix("T", 1, 1).unwrap();
        assert_eq!(t[0][0].square, q(5, 2));
        let r = sys.matrix("R", 1, 2).unwrap();
        assert_eq!(r[0][1].square, q(36, 5));
        let sq = sys.matrix("J2sq", 1, 1).unwrap();
        assert_eq!(sq[0][0].square, 169);
        assert!(sys.matrix("X", 1, 1).is_err());
        assert!(sys.matrix("J", 9, 9).is_err());
    }

    #[test]
    fn boundary_pair_for_degree_two() {
        let sys = example();
        let s2 = &sys.sobolev.polys[2];
        let c = q(-1, 1);
        // Values the float ledger must reproduce.
        assert_eq!(*s2, RatPoly::new(vec![q(-3, 2), q(-3, 4), q(1, 1)]));
        assert_eq!(s2.eval(&c), q(1, 4));
        assert_eq!(s2.derivative().eval(&c), q(-11, 4));
        assert_eq!(sys.sobolev.norms[2], q(89, 4));
    }

    #[test]
    fn families_are_orthogonal() {
        let sys = example();
        for f in [Family::Standard, Family::Once, Family::Twice, Family::Sobolev] {
            assert!(is_diagonal(&sys.gram(f, 7).unwrap()));
        }
    }
}
