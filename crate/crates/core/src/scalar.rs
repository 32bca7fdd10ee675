//! Exact rational scalars.
//!
//! Every distance, threshold and modulus in the crate is a [`Rational`]. The
//! canonical text form is always `p/q` (integers render as `n/1`), which is
//! what the file formats and reports use. Parsing additionally accepts bare
//! integers and finite decimals (`0.51` becomes `51/100`).

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An arbitrary-precision rational kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::Argument("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    /// `numer / denom` for small operands; panics on a zero denominator.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_big(value: BigRational) -> Self {
        Rational(value)
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `1/n`.
    pub fn reciprocal_of(n: u64) -> Self {
        assert!(n != 0, "reciprocal of zero");
        Rational(BigRational::new(BigInt::one(), BigInt::from(n)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn half(&self) -> Self {
        Rational(&self.0 / BigInt::from(2))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Argument("reciprocal of zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    /// Absolute difference, the metric of the real line.
    pub fn dist(&self, other: &Rational) -> Self {
        Rational((&self.0 - &other.0).abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `digits` fractional digits, rounded half away
    /// from zero. Display only; never used in a comparison.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10).pow(digits as u32);
        let numer = self.numer().abs() * &scale;
        let denom = self.denom();
        let (q, r) = numer.div_rem(denom);
        let q = if r * 2 >= *denom { q + 1 } else { q };
        let mut text = q.to_string();
        if digits > 0 {
            if text.len() <= digits {
                text = format!("{}{}", "0".repeat(digits + 1 - text.len()), text);
            }
            text.insert(text.len() - digits, '.');
        }
        if self.is_negative() && text.chars().any(|c| c.is_ascii_digit() && c != '0') {
            text.insert(0, '-');
        }
        text
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(text: &str) -> Result<BigInt> {
    let body = text.strip_prefix('+').unwrap_or(text);
    let digits = body.strip_prefix('-').unwrap_or(body);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not an integer: {text:?}")));
    }
    BigInt::from_str(body).map_err(|e| Error::Parse(format!("{text:?}: {e}")))
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let numer = parse_int(n.trim())?;
            let denom = parse_int(d.trim())?;
            if denom.sign() == Sign::NoSign {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Rational::new(numer, denom);
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("bad decimal {s:?}")));
            }
            let negative = whole.starts_with('-');
            let whole_digits = whole.trim_start_matches(['-', '+']);
            let whole_value = if whole_digits.is_empty() {
                BigInt::zero()
            } else {
                parse_int(whole_digits)?
            };
            let scale = BigInt::from(10).pow(frac.len() as u32);
            let magnitude = whole_value * &scale + parse_int(frac)?;
            let numer = if negative { -magnitude } else { magnitude };
            return Rational::new(numer, scale);
        }
        Ok(Rational::integer(parse_int(s)?))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

/// A modulus value: an exact rational or `+∞` (empty violation set).
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Modulus {
    Finite(Rational),
    Infinite,
}

impl Modulus {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Modulus::Infinite)
    }

    /// Holds at the sampled ε iff the modulus is strictly positive.
    pub fn is_positive(&self) -> bool {
        match self {
            Modulus::Finite(v) => v.is_positive(),
            Modulus::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Modulus::Finite(v) => Some(v),
            Modulus::Infinite => None,
        }
    }

    pub fn scale(&self, factor: &Rational) -> Modulus {
        match self {
            Modulus::Finite(v) => Modulus::Finite(v * factor),
            Modulus::Infinite => Modulus::Infinite,
        }
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        match self {
            Modulus::Finite(v) => v.to_decimal(digits),
            Modulus::Infinite => "inf".into(),
        }
    }
}

impl PartialOrd for Modulus {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Modulus {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Modulus::Finite(a), Modulus::Finite(b)) => a.cmp(b),
            (Modulus::Finite(_), Modulus::Infinite) => Ordering::Less,
            (Modulus::Infinite, Modulus::Finite(_)) => Ordering::Greater,
            (Modulus::Infinite, Modulus::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Finite(v) => fmt::Display::fmt(v, f),
            Modulus::Infinite => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Modulus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(Modulus::Infinite),
            other => Ok(Modulus::Finite(other.parse()?)),
        }
    }
}

impl Serialize for Modulus {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Modulus {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated list of rationals such as `1/3,0.5,2`.
pub fn parse_list(text: &str) -> Result<Vec<Rational>> {
    text.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(str::parse)
        .collect()
}
