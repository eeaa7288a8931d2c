//! Sobolev-type orthogonal polynomials with point masses on `f(c)` and
//! `f'(c)`, their five-term recurrence matrix, and the Jacobi matrices of the
//! iterated Christoffel transforms that factor it.
//!
//! Floating-point work uses MPFR through [`rug`] at a caller-chosen
//! precision; [`oracle`] redoes the small cases in exact rationals.

pub mod christoffel;
pub mod error;
pub mod kernels;
pub mod matrix;
pub mod oracle;
pub mod pipeline;
pub mod real;
pub mod sobolev;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::verify::{MatrixSet, ResidualReport};
pub use matrix::BandedMatrix;
pub use pipeline::Pipeline;
pub use real::Real;
pub use sobolev::{DerivativeIndexReading, SobolevLedger, SobolevSpec};
pub use spectral::{MeasureSpec, RecurrenceTable, Side, Support};
