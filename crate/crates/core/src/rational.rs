//! Exact rational scalars and the small helpers the formulas need.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Fractional part `x - floor(x)`, always in `[0, 1)`.
pub fn fract(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn floor_i64(x: &Rational) -> i64 {
    x.floor().to_integer().to_i64().expect("floor out of i64 range")
}

pub fn ceil_i64(x: &Rational) -> i64 {
    x.ceil().to_integer().to_i64().expect("ceil out of i64 range")
}

/// The integer value of `x`, or `None` when `x` has a denominator.
pub fn as_i64(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// `p/q`, or plain `p` for integers.
pub fn fmt_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `-p`, `p/q`. Fractions are reduced; a zero denominator is rejected.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::Parse {
        line: 1,
        column: 1,
        message: format!("malformed fraction `{s}`"),
    };
    let (n, d) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn is_unit_interval_open(x: &Rational) -> bool {
    x.abs() < Rational::one()
}
