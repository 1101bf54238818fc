//! Exact rational scalar used for every distance, margin and coordinate.
//!
//! All arithmetic in this crate is exact: values are arbitrary-precision
//! fractions kept in lowest terms with a positive denominator. Decimal
//! input such as `"2.625"` or `"1e-3"` is converted to the exact fraction
//! it denotes, never to a float.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest decimal exponent accepted by the parser. Anything beyond this is
/// rejected as over-precise input rather than silently materializing a huge
/// power of ten.
const MAX_EXPONENT: i64 = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty numeric token")]
    Empty,
    #[error("invalid numeric token `{0}`")]
    Invalid(String),
    #[error("denominator is zero in `{0}`")]
    ZeroDenominator(String),
    #[error("decimal exponent {0} exceeds the supported range +/-{MAX_EXPONENT}")]
    ExponentTooLarge(i64),
}

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Self, ParseRationalError> {
        if denom.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(numer.to_string()));
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn int(value: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn half(&self) -> Self {
        Rational(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }

    pub fn double(&self) -> Self {
        Rational(&self.0 * BigRational::from_integer(BigInt::from(2)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Absolute difference `|self - other|`.
    pub fn abs_diff(&self, other: &Self) -> Self {
        Rational((&self.0 - &other.0).abs())
    }

    /// Approximate conversion, for rendering only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact decimal rendering with `digits` fractional digits, rounded half
    /// away from zero, trailing zeros trimmed. Used only for display; stored
    /// values are never rounded.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        let sign = if self.0.is_negative() { "-" } else { "" };
        let pow = BigInt::from(10u8).pow(digits);
        let numer = self.0.numer().abs();
        let denom = self.0.denom().clone();
        // round(n * 10^digits / d) half away from zero
        let scaled = (&numer * &pow * 2u8 + &denom) / (&denom * 2u8);
        let (int_part, frac_part) = (&scaled / &pow, &scaled % &pow);
        if frac_part.is_zero() {
            return format!("{sign}{int_part}");
        }
        let mut frac = format!("{:0width$}", frac_part, width = digits as usize);
        while frac.ends_with('0') {
            frac.pop();
        }
        format!("{sign}{int_part}.{frac}")
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_integer(text: &str) -> Result<BigInt, ParseRationalError> {
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    BigInt::from_str(text).map_err(|_| ParseRationalError::Invalid(text.to_string()))
}

/// Parses `digits[.digits][e[+-]digits]` into an exact fraction.
fn parse_decimal(text: &str) -> Result<BigRational, ParseRationalError> {
    let invalid = || ParseRationalError::Invalid(text.to_string());
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = text[pos + 1..].parse().map_err(|_| invalid())?;
            (&text[..pos], exp)
        }
        None => (text, 0),
    };
    if exponent.abs() > MAX_EXPONENT {
        return Err(ParseRationalError::ExponentTooLarge(exponent));
    }
    let (sign, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_digits, frac_digits) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_digits.is_empty() && frac_digits.is_empty() {
        return Err(invalid());
    }
    if !int_digits.bytes().all(|b| b.is_ascii_digit())
        || !frac_digits.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(invalid());
    }
    let digits = format!("{int_digits}{frac_digits}");
    let mut numer = parse_integer(&digits)? * sign;
    let mut denom = BigInt::one();
    let shift = exponent - frac_digits.len() as i64;
    if shift >= 0 {
        numer *= BigInt::from(10u8).pow(shift as u32);
    } else {
        denom = BigInt::from(10u8).pow((-shift) as u32);
    }
    Ok(BigRational::new(numer, denom))
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        if text.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        if let Some((n, d)) = text.split_once('/') {
            let numer = parse_integer(n.trim())?;
            let denom = parse_integer(d.trim())?;
            if denom.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(text.to_string()));
            }
            return Ok(Rational(BigRational::new(numer, denom)));
        }
        parse_decimal(text).map(Rational)
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::int(value)
    }
}

impl From<BigRational> for Rational {
    fn from(value: BigRational) -> Self {
        Rational(value)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as a string \"a/b\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational(BigRational::from_integer(BigInt::from(v))))
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}
