//! Thin helpers over MPFR floats so the numeric modules read closer to the
//! formulas they implement.

use rug::{Float, Rational};

pub type Real = Float;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Smallest precision accepted by the public constructors.
pub const MIN_PRECISION: u32 = 64;

pub fn zero(prec: u32) -> Real {
    Float::new(prec)
}

pub fn one(prec: u32) -> Real {
    Float::with_val(prec, 1)
}

pub fn from_f64(prec: u32, v: f64) -> Real {
    Float::with_val(prec, v)
}

pub fn from_rational(prec: u32, v: &Rational) -> Real {
    Float::with_val(prec, v)
}

/// Parses a decimal literal such as `-1`, `0.25` or `1e-3`.
pub fn parse(prec: u32, s: &str) -> Option<Real> {
    Float::parse(s.trim()).ok().map(|p| Float::with_val(prec, p))
}

pub fn sqrt(v: &Real) -> Real {
    Float::with_val(v.prec(), v.sqrt_ref())
}

pub fn abs(v: &Real) -> Real {
    Float::with_val(v.prec(), v.abs_ref())
}

pub fn square(v: &Real) -> Real {
    Float::with_val(v.prec(), v.square_ref())
}

/// `|a - b| / max(|a|, |b|)`, or the absolute difference when both vanish.
pub fn rel_diff(a: &Real, b: &Real) -> Real {
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    let scale = abs(a).max(&abs(b));
    if scale.is_zero() {
        diff
    } else {
        diff / scale
    }
}

/// `2^(-bits)` at the given precision; used to build precision-scaled tolerances.
pub fn pow2_neg(prec: u32, bits: u32) -> Real {
    Float::with_val(prec, 1) >> bits
}

/// Tolerance used for built-in dual-route consistency checks: half the
/// working mantissa, so only gross disagreement is reported as a failure.
pub fn consistency_tolerance(prec: u32) -> Real {
    pow2_neg(prec, prec / 2)
}

pub fn to_f64(v: &Real) -> f64 {
    v.to_f64()
}

/// Decimal digits needed so that printing and re-parsing reproduces the value.
pub fn round_trip_digits(prec: u32) -> usize {
    // ceil(prec * log10(2)) + 1
    ((prec as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1
}

/// Renders a value with enough digits to round-trip at its precision.
pub fn to_decimal(v: &Real) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    v.to_string_radix(10, Some(round_trip_digits(v.prec())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_round_trip_is_exact() {
        let prec = 256;
        let x = Float::with_val(prec, 2).sqrt() / 7u32;
        let s = to_decimal(&x);
        let y = parse(prec, &s).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn rel_diff_of_equal_values_is_zero() {
        let a = from_f64(128, 3.5);
        assert!(rel_diff(&a, &a).is_zero());
        assert!(rel_diff(&zero(128), &zero(128)).is_zero());
    }
}
