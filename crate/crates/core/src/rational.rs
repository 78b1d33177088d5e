//! Exact rational scalars and their `"p/q"` wire format.
//!
//! Every quantity in this crate that is not a plain integer is a
//! [`Rat`] (an arbitrary-precision rational). Floating point is never
//! used: wall-incidence tests of the form `beta(pi(t)) in Z` must be
//! decided exactly.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::str::FromStr;

/// Arbitrary-precision rational number.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n / d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `"p"` or `"p/q"` (lowest terms, `q > 0`).
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"` or `"p/q"`. Whitespace around the parts is accepted.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    match s.split_once('/') {
        None => {
            let n = BigInt::from_str(s).map_err(|_| ParseRatError(s.to_string()))?;
            Ok(Rat::from_integer(n))
        }
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| ParseRatError(s.to_string()))?;
            let q = BigInt::from_str(q.trim()).map_err(|_| ParseRatError(s.to_string()))?;
            if q.is_zero() {
                return Err(ParseRatError(s.to_string()));
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Error for a malformed rational literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational literal `{0}` (expected `p` or `p/q`)")]
pub struct ParseRatError(pub String);

/// True when `x` is an integer.
pub fn is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// True when `x` is a nonnegative integer.
pub fn is_nonneg_integer(x: &Rat) -> bool {
    is_integer(x) && !x.is_negative()
}

/// Floor of a rational as a `BigInt`.
pub fn floor_int(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

/// Serde adapter: (de)serializes a `Rat` through the `"p/q"` string form.
pub mod serde_rat {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter over `Vec<Rat>` in the `"p/q"` string form.
pub mod serde_rat_vec {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rat(s).map_err(D::Error::custom))
            .collect()
    }
}
