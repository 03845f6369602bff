//! Exact rational scalar used for every length, area and profit.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseScalarError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// An exact rational number.
///
/// Serializes as a string: `"p/q"` in lowest terms, or `"p"` when the
/// denominator is one. Parsing also accepts plain decimals such as `"0.125"`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(value: BigRational) -> Self {
        Scalar(value)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
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

    pub fn square(&self) -> Self {
        Scalar(&self.0 * &self.0)
    }

    pub fn pow(&self, exp: u32) -> Self {
        Scalar(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// `floor(self)` as a machine integer, saturating.
    pub fn floor_u64(&self) -> u64 {
        let f = self.floor();
        if f.sign() == Sign::Minus {
            0
        } else {
            f.to_u64().unwrap_or(u64::MAX)
        }
    }

    pub fn ceil_u64(&self) -> u64 {
        let c = self.ceil();
        if c.sign() == Sign::Minus {
            0
        } else {
            c.to_u64().unwrap_or(u64::MAX)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Number of bits in numerator plus denominator. Used to cap work on
    /// schedules whose thresholds become astronomically small.
    pub fn bit_size(&self) -> u64 {
        self.0.numer().bits() + self.0.denom().bits()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(text: &str, whole: &str) -> Result<BigInt, ParseScalarError> {
    let digits = text.strip_prefix('-').or_else(|| text.strip_prefix('+')).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseScalarError::Invalid(whole.to_string()));
    }
    text.parse::<BigInt>()
        .map_err(|_| ParseScalarError::Invalid(whole.to_string()))
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        if let Some((num, den)) = t.split_once('/') {
            let num = parse_int(num.trim(), s)?;
            let den = den.trim();
            if den.starts_with('-') || den.starts_with('+') {
                return Err(ParseScalarError::Invalid(s.to_string()));
            }
            let den = parse_int(den, s)?;
            if den.is_zero() {
                return Err(ParseScalarError::ZeroDenominator(s.to_string()));
            }
            return Ok(Scalar(BigRational::new(num, den)));
        }
        if let Some((int, frac)) = t.split_once('.') {
            let negative = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if (int_digits.is_empty() && frac.is_empty())
                || !int_digits.bytes().all(|b| b.is_ascii_digit())
                || !frac.bytes().all(|b| b.is_ascii_digit())
                || int.len() > int_digits.len() + 1
            {
                return Err(ParseScalarError::Invalid(s.to_string()));
            }
            // Cap the exponent so hostile inputs cannot request a 10^huge allocation.
            if frac.len() > 4096 {
                return Err(ParseScalarError::Invalid(s.to_string()));
            }
            let mut digits = String::with_capacity(int_digits.len() + frac.len());
            digits.push_str(int_digits);
            digits.push_str(frac);
            let magnitude = if digits.is_empty() {
                BigInt::zero()
            } else {
                digits
                    .parse::<BigInt>()
                    .map_err(|_| ParseScalarError::Invalid(s.to_string()))?
            };
            let den = num_traits::pow(BigInt::from(10u32), frac.len());
            let value = BigRational::new(magnitude, den);
            return Ok(Scalar(if negative { -value } else { value }));
        }
        Ok(Scalar(BigRational::from_integer(parse_int(t, s)?)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Self {
        Scalar(BigRational::from_integer(n))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// Least common multiple of the denominators, or `None` once it exceeds `cap`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Scalar>, cap: &BigInt) -> Option<BigInt> {
    let mut l = BigInt::one();
    for v in values {
        l = l.lcm(v.denom());
        if &l > cap {
            return None;
        }
    }
    Some(l)
}

/// Convenience for tests and examples: `q("3/4")`. Panics on bad input.
pub fn q(text: &str) -> Scalar {
    text.parse().expect("valid rational literal")
}
