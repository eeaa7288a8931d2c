//! Reference squared entries for Laguerre `alpha = 0`, `c = -1`, `M = N = 1`,
//! shipped as `fixtures/laguerre_example.json`.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::example::ExactSystems;
use super::{squared_entry_compare, SquaredEntry};
use crate::error::{Error, Result};
use crate::matrix::verify::MatrixSet;
use crate::matrix::BandedMatrix;
use crate::real::Real;

const REFERENCE_JSON: &str = include_str!("../../fixtures/laguerre_example.json");

/// Matrix names in reporting order.
pub const MATRIX_ORDER: [&str; 10] = ["J", "L", "J1", "L1", "J2", "Q", "R", "T", "H", "J2sq"];

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Fixture {
    pub measure: String,
    pub alpha: String,
    pub c: String,
    #[serde(rename = "M")]
    pub m: String,
    #[serde(rename = "N")]
    pub n: String,
    pub note: String,
    pub matrices: BTreeMap<String, FixtureMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct FixtureMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `(i, j, numerator, denominator, sign)` of the squared entry.
    pub entries: Vec<(usize, usize, String, String, i8)>,
}

impl FixtureMatrix {
    /// Full `rows x cols` block; unlisted entries are zero.
    pub fn dense(&self) -> Result<Vec<Vec<SquaredEntry>>> {
        let mut out = vec![vec![SquaredEntry::zero(); self.cols]; self.rows];
        for (i, j, num, den, sign) in &self.entries {
            if *i >= self.rows || *j >= self.cols {
                return Err(Error::InvalidParameter(format!("fixture entry ({i}, {j}) outside its block")));
            }
            out[*i][*j] = SquaredEntry::from_parts(num, den, *sign)?;
        }
        Ok(out)
    }
}

pub fn reference_example() -> Result<Fixture> {
    serde_json::from_str(REFERENCE_JSON)
        .map_err(|e| Error::Internal(format!("reference fixture does not parse: {e}")))
}

impl Fixture {
    pub fn matrix(&self, name: &str) -> Result<&FixtureMatrix> {
        self.matrices
            .get(name)
            .ok_or_else(|| Error::Internal(format!("fixture has no matrix {name}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixVerdict {
    pub name: String,
    pub checked: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl MatrixVerdict {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.checked == self.passed
    }
}

/// Exact comparison of the oracle's squared entries with the fixture.
pub fn check_oracle(fixture: &Fixture, systems: &ExactSystems) -> Result<Vec<MatrixVerdict>> {
    MATRIX_ORDER
        .iter()
        .map(|name| {
            let fm = fixture.matrix(name)?;
            let want = fm.dense()?;
            let got = systems.matrix(name, fm.rows, fm.cols)?;
            let mut v = MatrixVerdict {
                name: name.to_string(),
                checked: 0,
                passed: 0,
                failures: Vec::new(),
            };
            for i in 0..fm.rows {
                for j in 0..fm.cols {
                    v.checked += 1;
                    if got[i][j] == want[i][j] {
                        v.passed += 1;
                    } else {
                        v.failures.push(format!(
                            "{name}({i},{j}): oracle {} (sign {}), reference {} (sign {})",
                            got[i][j].square, got[i][j].sign, want[i][j].square, want[i][j].sign
                        ));
                    }
                }
            }
            Ok(v)
        })
        .collect()
}

fn float_matrix<'a>(set: &'a MatrixSet, name: &str, j2sq: &'a BandedMatrix) -> Result<&'a BandedMatrix> {
    Ok(match name {
        "J" => &set.j,
        "L" => &set.l,
        "J1" => &set.j1,
        "L1" => &set.l1,
        "J2" => &set.j2,
        "Q" => &set.q,
        "R" => &set.r,
        "T" => &set.t,
        "H" => &set.h,
        "J2sq" => j2sq,
        other => return Err(Error::InvalidParameter(format!("unknown matrix {other:?}"))),
    })
}

/// Float matrices against the fixture: sign match and relative error of the
/// squared entry at most `tol`; zero entries must be within `tol` absolutely.
pub fn check_float(fixture: &Fixture, set: &MatrixSet, tol: &Real) -> Result<Vec<MatrixVerdict>> {
    let j2sq = set.j2_shift_squared()?;
    MATRIX_ORDER
        .iter()
        .map(|name| {
            let fm = fixture.matrix(name)?;
            let want = fm.dense()?;
            let m = float_matrix(set, name, &j2sq)?;
            if fm.rows.max(fm.cols) > m.exact_size() {
                return Err(Error::Internal(format!(
                    "{name}: reference block {}x{} exceeds exact size {}",
                    fm.rows,
                    fm.cols,
                    m.exact_size()
                )));
            }
            let mut v = MatrixVerdict {
                name: name.to_string(),
                checked: 0,
                passed: 0,
                failures: Vec::new(),
            };
            for i in 0..fm.rows {
                for j in 0..fm.cols {
                    v.checked += 1;
                    match squared_entry_compare(m.get(i, j), &want[i][j], tol) {
                        None => v.passed += 1,
                        Some(msg) => v.failures.push(format!("{name}({i},{j}): {msg}")),
                    }
                }
            }
            Ok(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_parses() {
        let f = reference_example().unwrap();
        assert_eq!(f.matrices.len(), MATRIX_ORDER.len());
        let j = f.matrix("J").unwrap();
        assert_eq!((j.rows, j.cols), (6, 6));
        let h = f.matrix("H").unwrap().dense().unwrap();
        assert_eq!(h[0][1].square, rug::Rational::from((121, 8)));
        assert_eq!(h[0][1].sign, 1);
        let sq = f.matrix("J2sq").unwrap().dense().unwrap();
        assert_eq!(sq[0][0].square, 169);
        let r = f.matrix("R").unwrap().dense().unwrap();
        assert_eq!(r[0][1].square, rug::Rational::from((36, 5)));
        assert!(f.matrix("nope").is_err());
    }
}
