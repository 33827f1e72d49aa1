//! Scalar abstraction shared by the LP, load and move code.
//!
//! Everything that only needs field arithmetic and comparisons is written
//! against [`Scalar`]. Exact types (`BigRational`, `Rational64`) use a zero
//! tolerance; floating point types use a small absolute tolerance so that the
//! same code paths can be exercised as a cross-check.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, One, Signed, Zero};

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Signed + FromPrimitive + Send + Sync + 'static
{
    /// Absolute tolerance used by every comparison helper below.
    fn tolerance() -> Self;

    /// `true` when the type represents values exactly.
    fn is_exact() -> bool;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn approx_zero(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    /// `self > other` beyond tolerance.
    fn definitely_gt(&self, other: &Self) -> bool {
        self.clone() - other.clone() > Self::tolerance()
    }

    /// `self < other` beyond tolerance.
    fn definitely_lt(&self, other: &Self) -> bool {
        other.definitely_gt(self)
    }

    /// `self <= other` up to tolerance.
    fn approx_le(&self, other: &Self) -> bool {
        !self.definitely_gt(other)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).approx_zero()
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    /// `min{1, x}`.
    fn clamp_one(self) -> Self {
        Self::min_of(self, Self::one())
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
    fn is_exact() -> bool {
        false
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }
    fn is_exact() -> bool {
        false
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f32 / denom as f32
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        Self::zero()
    }
    fn is_exact() -> bool {
        true
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(BigInt::from(numer), BigInt::from(denom))
    }
}

impl Scalar for Ratio<i64> {
    fn tolerance() -> Self {
        Self::zero()
    }
    fn is_exact() -> bool {
        true
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }
}

/// Parses `p/q` or an integer into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Ratio::new(p, q))
        }
        None => text.parse::<BigInt>().ok().map(Ratio::from_integer),
    }
}

/// Renders `p/q`, or just `p` when the denominator is one.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Serde helpers that encode rationals as `p/q` strings.
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text)
            .ok_or_else(|| D::Error::custom(format!("invalid rational `{text}`")))
    }

    pub mod vec {
        use num_rational::BigRational;
        use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(values: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&super::super::format_rational(v))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts
                .iter()
                .map(|t| {
                    super::super::parse_rational(t)
                        .ok_or_else(|| D::Error::custom(format!("invalid rational `{t}`")))
                })
                .collect()
        }
    }
}
