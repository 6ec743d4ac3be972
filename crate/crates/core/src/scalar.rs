//! Scalar backends.
//!
//! Two backends share one trait: `f64` with a [`Tolerance`], and
//! [`Rational`] (arbitrary precision) where every comparison is exact.
//! Generic code asks the scalar itself how to compare, so the same routine
//! runs unchanged on either backend.

use std::fmt::{Debug, Display};
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Absolute and relative slack for the floating backend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !(abs.is_finite() && rel.is_finite() && abs >= 0.0 && rel >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be finite and nonnegative (abs={abs}, rel={rel})"
            )));
        }
        Ok(Tolerance { abs, rel })
    }

    pub fn exact() -> Self {
        Tolerance { abs: 0.0, rel: 0.0 }
    }

    pub fn with_abs(abs: f64) -> Self {
        Tolerance {
            abs,
            ..Default::default()
        }
    }

    /// `|a - b| <= abs + rel * max(|a|, |b|)`
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }
}

/// Zero slack for exact scalars, the default tolerance for floats.
pub fn default_tolerance<S: Scalar>() -> Tolerance {
    if S::EXACT {
        Tolerance::exact()
    } else {
        Tolerance::default()
    }
}

pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// True for backends whose comparisons ignore the tolerance.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;
    /// Exact conversion for rationals (the binary value of the float).
    fn from_f64(v: f64) -> Result<Self>;
    fn to_f64(&self) -> f64;
    fn is_finite(&self) -> bool;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `self >= 0`, with one-sided slack `-abs` in the floating backend.
    fn nonneg(&self, tol: &Tolerance) -> bool;

    /// `self > 0`, requiring a margin of `abs` in the floating backend.
    fn positive(&self, tol: &Tolerance) -> bool;

    /// Equality, within `abs + rel * max(|a|, |b|)` in the floating backend.
    fn same(&self, other: &Self, tol: &Tolerance) -> bool;

    fn from_json(v: &Value) -> Result<Self>;
    fn to_json(&self) -> Value;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { index: 0 })
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn nonneg(&self, tol: &Tolerance) -> bool {
        *self >= -tol.abs
    }

    fn positive(&self, tol: &Tolerance) -> bool {
        *self > tol.abs
    }

    fn same(&self, other: &Self, tol: &Tolerance) -> bool {
        tol.close(*self, *other)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(format!("number {n} is not a finite float"))),
            Value::String(s) => {
                let q = parse_rational(s)?;
                Ok(ToPrimitive::to_f64(&q).unwrap_or(f64::NAN))
            }
            other => Err(Error::Parse(format!("expected a number, found {other}"))),
        }
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Result<Self> {
        Rational::from_float(v).ok_or(Error::NonFinite { index: 0 })
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn nonneg(&self, _tol: &Tolerance) -> bool {
        !self.is_negative()
    }

    fn positive(&self, _tol: &Tolerance) -> bool {
        self.is_positive()
    }

    fn same(&self, other: &Self, _tol: &Tolerance) -> bool {
        self == other
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            // With arbitrary-precision numbers the original decimal text survives,
            // so `0.1` parses to exactly 1/10.
            Value::Number(n) => parse_rational(&n.to_string()),
            Value::String(s) => parse_rational(s),
            other => Err(Error::Parse(format!("expected a rational, found {other}"))),
        }
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
}

/// Parses `p/q`, integers, and decimal literals (with optional exponent) exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let num = BigInt::from_str(p.trim())
            .map_err(|_| Error::Parse(format!("bad numerator in `{text}`")))?;
        let den = BigInt::from_str(q.trim())
            .map_err(|_| Error::Parse(format!("bad denominator in `{text}`")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{text}`")));
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{text}`")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['-', '+']);
    if !int_digits.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("bad numeric literal `{text}`")));
    }
    if int_digits.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("bad numeric literal `{text}`")));
    }
    let digits = format!("{int_digits}{frac_part}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| Error::Parse(format!("bad numeric literal `{text}`")))?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i64;
    if exponent.abs() > 10_000 {
        return Err(Error::Parse(format!("exponent out of range in `{text}`")));
    }
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Rational {
    let two = BigInt::from(2);
    if k >= 0 {
        Rational::from_integer(num_traits::pow(two, k as usize))
    } else {
        Rational::new(BigInt::one(), num_traits::pow(two, (-k) as usize))
    }
}

/// Extended reals: a finite value or one of the infinities.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Extended {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Extended {
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            Extended::PosInf
        } else if v == f64::NEG_INFINITY {
            Extended::NegInf
        } else {
            Extended::Finite(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Extended::NegInf => f64::NEG_INFINITY,
            Extended::Finite(v) => v,
            Extended::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Extended::Finite(_))
    }
}

impl Display for Extended {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extended::NegInf => write!(f, "-inf"),
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInf => write!(f, "+inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::PosInf => s.serialize_str("+inf"),
            Extended::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        extended_from_json(&v).map_err(serde::de::Error::custom)
    }
}

pub fn extended_from_json(v: &Value) -> Result<Extended> {
    match v {
        Value::Null => Ok(Extended::PosInf),
        Value::String(s) => match s.trim() {
            "inf" | "+inf" | "Infinity" | "+Infinity" => Ok(Extended::PosInf),
            "-inf" | "-Infinity" => Ok(Extended::NegInf),
            other => Ok(Extended::Finite(
                ToPrimitive::to_f64(&parse_rational(other)?).unwrap_or(f64::NAN),
            )),
        },
        Value::Number(_) => Ok(Extended::Finite(f64::from_json(v)?)),
        other => Err(Error::Parse(format!(
            "expected an extended real, found {other}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.1").unwrap(), Rational::ratio(1, 10));
        assert_eq!(parse_rational("-1.25e-1").unwrap(), Rational::ratio(-1, 8));
        assert_eq!(parse_rational("3/6").unwrap(), Rational::ratio(1, 2));
        assert_eq!(parse_rational("12e2").unwrap(), Rational::from_i64(1200));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn json_numbers_keep_decimal_text() {
        let v: Value = serde_json::from_str("0.3").unwrap();
        assert_eq!(Rational::from_json(&v).unwrap(), Rational::ratio(3, 10));
        assert_eq!(
            Rational::ratio(3, 10).to_json(),
            Value::String("3/10".into())
        );
        assert_eq!(f64::from_json(&Value::String("1/4".into())).unwrap(), 0.25);
    }

    #[test]
    fn float_comparisons_use_one_sided_slack() {
        let tol = Tolerance::default();
        assert!((-1e-10f64).nonneg(&tol));
        assert!(!(-1e-8f64).nonneg(&tol));
        assert!(!Rational::ratio(-1, 1_000_000_000_000).nonneg(&tol));
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(-3), Rational::ratio(1, 8));
        assert_eq!(pow2(4), Rational::from_i64(16));
    }
}
