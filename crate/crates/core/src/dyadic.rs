//! Exact signed dyadic rationals `numerator / 2^exponent`.
//!
//! Every value is kept in canonical form: when the exponent is positive the
//! numerator is odd, and zero is stored as `0 / 2^0`. Arithmetic is exact;
//! an intermediate that does not fit in `i128` panics rather than rounding.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DyadicError {
    #[error("exponent {0} exceeds the supported maximum of {MAX_EXPONENT}")]
    ExponentTooLarge(u32),
    #[error("cannot parse dyadic rational from {0:?}")]
    Parse(String),
    #[error("{0} is not a dyadic rational")]
    NotDyadic(String),
}

/// Largest exponent accepted by the public constructors.
pub const MAX_EXPONENT: u32 = 120;

/// An exact value `num / 2^exp`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDyadic", into = "RawDyadic")]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

#[derive(Serialize, Deserialize)]
struct RawDyadic {
    num: i128,
    exp: u32,
}

impl TryFrom<RawDyadic> for Dyadic {
    type Error = DyadicError;

    fn try_from(raw: RawDyadic) -> Result<Self, Self::Error> {
        Dyadic::new(raw.num, raw.exp)
    }
}

impl From<Dyadic> for RawDyadic {
    fn from(d: Dyadic) -> Self {
        RawDyadic {
            num: d.num,
            exp: d.exp,
        }
    }
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    /// Builds `num / 2^exp`, reducing to canonical form.
    pub fn new(num: i128, exp: u32) -> Result<Self, DyadicError> {
        if exp > MAX_EXPONENT {
            return Err(DyadicError::ExponentTooLarge(exp));
        }
        Ok(Self::canonical(num, exp))
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic {
            num: n as i128,
            exp: 0,
        }
    }

    /// `2^-k`.
    pub fn pow2_inv(k: u32) -> Self {
        assert!(k <= MAX_EXPONENT, "exponent {k} out of range");
        Dyadic { num: 1, exp: k }
    }

    fn canonical(mut num: i128, mut exp: u32) -> Self {
        if num == 0 {
            return Dyadic::ZERO;
        }
        let tz = num.trailing_zeros().min(exp);
        num >>= tz;
        exp -= tz;
        Dyadic { num, exp }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn abs(self) -> Self {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Numerator of `self` over the fixed denominator `2^exp`, if it is an integer there.
    pub fn scaled_numerator(&self, exp: u32) -> Option<i128> {
        if self.exp > exp {
            return None;
        }
        self.num.checked_mul(1i128.checked_shl(exp - self.exp)?)
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> i128 {
        self.num >> self.exp
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.exp as i32)
    }

    /// Reads a finite `f64`; every finite binary float is dyadic.
    pub fn from_f64(v: f64) -> Result<Self, DyadicError> {
        if !v.is_finite() {
            return Err(DyadicError::NotDyadic(v.to_string()));
        }
        let mut num = v;
        let mut exp = 0u32;
        while num.fract() != 0.0 {
            num *= 2.0;
            exp += 1;
            if exp > MAX_EXPONENT {
                return Err(DyadicError::ExponentTooLarge(exp));
            }
        }
        if num.abs() >= 2f64.powi(126) {
            return Err(DyadicError::NotDyadic(v.to_string()));
        }
        Dyadic::new(num as i128, exp)
    }

    /// Nearest point of the grid `2^-exp Z`, ties rounded away from zero.
    pub fn round_to_grid(v: f64, exp: u32) -> Result<Self, DyadicError> {
        if !v.is_finite() {
            return Err(DyadicError::NotDyadic(v.to_string()));
        }
        let scaled = (v * 2f64.powi(exp as i32)).round();
        Dyadic::new(scaled as i128, exp)
    }

    fn aligned(a: Dyadic, b: Dyadic) -> (i128, i128, u32) {
        let exp = a.exp.max(b.exp);
        let lift = |d: Dyadic| {
            d.num
                .checked_mul(1i128 << (exp - d.exp))
                .expect("dyadic overflow")
        };
        (lift(a), lift(b), exp)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::ZERO
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, exp) = Dyadic::aligned(self, rhs);
        Dyadic::canonical(a.checked_add(b).expect("dyadic overflow"), exp)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: Dyadic) -> Dyadic {
        let num = self.num.checked_mul(rhs.num).expect("dyadic overflow");
        let exp = self.exp + rhs.exp;
        assert!(exp <= 126, "dyadic overflow");
        Dyadic::canonical(num, exp)
    }
}

impl Mul<i64> for Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: i64) -> Dyadic {
        let num = self.num.checked_mul(rhs as i128).expect("dyadic overflow");
        Dyadic::canonical(num, self.exp)
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |acc, d| acc + d)
    }
}

impl<'a> Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.copied().sum()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Dyadic::aligned(*self, *other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u128 << self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Dyadic {
    type Err = DyadicError;

    /// Accepts `"k"` or `"k/2^e"` written as `"k/m"` with `m` a power of two.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse_err = || DyadicError::Parse(s.to_string());
        match s.split_once('/') {
            None => s
                .parse::<i128>()
                .map(|n| Dyadic::canonical(n, 0))
                .map_err(|_| parse_err()),
            Some((n, d)) => {
                let num: i128 = n.trim().parse().map_err(|_| parse_err())?;
                let den: u128 = d.trim().parse().map_err(|_| parse_err())?;
                if den == 0 || !den.is_power_of_two() {
                    return Err(DyadicError::NotDyadic(s.to_string()));
                }
                Dyadic::new(num, den.trailing_zeros())
            }
        }
    }
}
