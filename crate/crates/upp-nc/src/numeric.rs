//! Exact rationals and the extended value set `Q ∪ {+inf, -inf}`.
//!
//! Curve coordinates are kept in lowest terms at all times. The text form is
//! `p/q`, `p` when `q = 1`, and `inf` / `-inf` for the infinities.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always normalized.
pub type Rational = BigRational;

/// Builds `p/q` from machine integers. Panics on `q = 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer rational.
pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// `N_x`: numerator of `x` in lowest terms.
pub fn numerator(x: &Rational) -> BigInt {
    x.numer().clone()
}

/// `D_x`: denominator of `x` in lowest terms, always positive.
pub fn denominator(x: &Rational) -> BigInt {
    x.denom().clone()
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

/// Least common multiple of two positive rationals: the smallest positive
/// rational that is an integer multiple of both.
pub fn lcm(a: &Rational, b: &Rational) -> Rational {
    debug_assert!(a.is_positive() && b.is_positive());
    let num = a.numer().lcm(b.numer());
    let den = a.denom().gcd(b.denom());
    Rational::new(num, den)
}

pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// A rational or one of the two infinities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedValue {
    MinusInfinity,
    Finite(Rational),
    PlusInfinity,
}

pub use ExtendedValue::{Finite, MinusInfinity, PlusInfinity};

impl ExtendedValue {
    pub fn zero() -> Self {
        Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Finite(x) => Some(x),
            _ => None,
        }
    }

    /// The finite value, or an error naming `what`.
    pub fn expect_finite(&self, what: &str) -> Result<&Rational> {
        self.finite()
            .ok_or_else(|| Error::Precondition(format!("{what} is {self}, expected a finite value")))
    }

    /// Sum with the convention `+inf + finite = +inf`. Opposite infinities are an error.
    pub fn add(&self, other: &ExtendedValue) -> Result<ExtendedValue> {
        match (self, other) {
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
            (PlusInfinity, MinusInfinity) | (MinusInfinity, PlusInfinity) => Err(Error::InfiniteArithmetic),
            (PlusInfinity, _) | (_, PlusInfinity) => Ok(PlusInfinity),
            _ => Ok(MinusInfinity),
        }
    }

    pub fn add_rational(&self, r: &Rational) -> ExtendedValue {
        match self {
            Finite(a) => Finite(a + r),
            inf => inf.clone(),
        }
    }

    pub fn neg(&self) -> ExtendedValue {
        match self {
            Finite(a) => Finite(-a),
            PlusInfinity => MinusInfinity,
            MinusInfinity => PlusInfinity,
        }
    }

    pub fn sub(&self, other: &ExtendedValue) -> Result<ExtendedValue> {
        self.add(&other.neg())
    }

    /// Product with a rational. `inf * 0` is taken as 0.
    pub fn mul_rational(&self, r: &Rational) -> ExtendedValue {
        match self {
            Finite(a) => Finite(a * r),
            _ if r.is_zero() => ExtendedValue::zero(),
            inf if r.is_positive() => inf.clone(),
            inf => inf.neg(),
        }
    }

    pub fn min(a: &ExtendedValue, b: &ExtendedValue) -> ExtendedValue {
        if a <= b { a.clone() } else { b.clone() }
    }

    pub fn max(a: &ExtendedValue, b: &ExtendedValue) -> ExtendedValue {
        if a >= b { a.clone() } else { b.clone() }
    }
}

impl From<Rational> for ExtendedValue {
    fn from(r: Rational) -> Self {
        Finite(r)
    }
}

impl From<&Rational> for ExtendedValue {
    fn from(r: &Rational) -> Self {
        Finite(r.clone())
    }
}

impl Ord for ExtendedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (MinusInfinity, MinusInfinity) | (PlusInfinity, PlusInfinity) => Ordering::Equal,
            (MinusInfinity, _) | (_, PlusInfinity) => Ordering::Less,
            (PlusInfinity, _) | (_, MinusInfinity) => Ordering::Greater,
        }
    }
}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order on extended values.
pub fn compare(a: &ExtendedValue, b: &ExtendedValue) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(x) => f.write_str(&format_rational(x)),
            PlusInfinity => f.write_str("inf"),
            MinusInfinity => f.write_str("-inf"),
        }
    }
}

impl FromStr for ExtendedValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(PlusInfinity),
            "-inf" => Ok(MinusInfinity),
            other => parse_rational(other).map(Finite),
        }
    }
}
