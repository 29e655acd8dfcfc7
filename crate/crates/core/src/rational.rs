//! Exact rationals: parsing, formatting and serde as `"num/den"` strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// How a probability was written on input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Notation {
    /// `"1/4"` or `"3"`: exact.
    Rational,
    /// `"0.25"`: accepted only where exactness does not matter.
    Float,
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Parses `"a/b"`, `"a"` or a decimal literal.
///
/// Decimal input is converted to the exact binary value of the parsed
/// `f64` and tagged [`Notation::Float`].
pub fn parse_rational(s: &str) -> Result<(BigRational, Notation)> {
    let s = s.trim();
    let bad = || Error::Domain(format!("cannot parse {s:?} as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Domain(format!("zero denominator in {s:?}")));
        }
        return Ok((BigRational::new(n, d), Notation::Rational));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok((BigRational::from_integer(n), Notation::Rational));
    }
    let f: f64 = s.parse().map_err(|_| bad())?;
    let r = BigRational::from_float(f).ok_or_else(bad)?;
    Ok((r, Notation::Float))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn in_unit_interval(r: &BigRational) -> bool {
    !r.is_negative() && *r <= BigRational::one()
}

/// Serde adapter writing a rational as its `Display` string (`"11/12"`, `"2"`).
pub mod serde_str {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        match parse_rational(&s) {
            Ok((r, Notation::Rational)) => Ok(r),
            Ok((_, Notation::Float)) => {
                Err(de::Error::custom(format!("{s:?} is not an exact rational")))
            }
            Err(e) => Err(de::Error::custom(e)),
        }
    }
}
