//! One-call construction of every ledger and matrix for a Sobolev spec.
//!
//! Everything is built at `size + guard` so that the reported leading blocks
//! of side `size` stay clear of truncation effects (four guard rows cover the
//! deepest chain, `R R^T`).

use crate::christoffel::ChristoffelLedger;
use crate::error::{Error, Result};
use crate::matrix::factory::{
    build_h, build_jacobi, build_t, cholesky_shifted, commute_cholesky, iterated_jacobi, qr_pair,
};
use crate::matrix::verify::{verify_propositions, MatrixSet, ResidualReport};
use crate::sobolev::{DerivativeIndexReading, SobolevLedger, SobolevSpec};
use crate::spectral::RecurrenceTable;

pub const DEFAULT_GUARD: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub spec: SobolevSpec,
    pub size: usize,
    pub guard: usize,
    pub rec: RecurrenceTable,
    pub christoffel: ChristoffelLedger,
    pub sobolev: SobolevLedger,
    pub matrices: MatrixSet,
}

impl Pipeline {
    pub fn build(spec: &SobolevSpec, size: usize, guard: usize) -> Result<Self> {
        Self::build_with_reading(spec, size, guard, DerivativeIndexReading::default())
    }

    pub fn build_with_reading(
        spec: &SobolevSpec,
        size: usize,
        guard: usize,
        reading: DerivativeIndexReading,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("size must be positive".into()));
        }
        let m = size + guard;
        let rec = spec.base.recurrence(m + 2)?;
        let christoffel = ChristoffelLedger::build(&rec, &spec.c, m)?;
        let sobolev = SobolevLedger::build(&rec, &christoffel, spec, m, reading)?;

        let c = &spec.c;
        let side = spec.side();
        let j = build_jacobi(&rec, m)?;
        let l = cholesky_shifted(&j, c, side)?;
        let j1 = commute_cholesky(&l, c, side);
        let l1 = cholesky_shifted(&j1, c, side)?;
        let j2 = commute_cholesky(&l1, c, side);
        let (q, r) = qr_pair(&l, &l1)?;
        let matrices = MatrixSet {
            c: c.clone(),
            side,
            j2_ledger: iterated_jacobi(&christoffel, m)?,
            t: build_t(&sobolev, m)?,
            h: build_h(&sobolev, m)?,
            j,
            l,
            j1,
            l1,
            j2,
            q,
            r,
        };
        Ok(Pipeline {
            spec: spec.clone(),
            size,
            guard,
            rec,
            christoffel,
            sobolev,
            matrices,
        })
    }

    /// Identity residuals on the leading `size` block (or smaller where the
    /// guard band is too thin).
    pub fn verify(&self) -> Result<ResidualReport> {
        verify_propositions(&self.matrices, self.size)
    }
}
