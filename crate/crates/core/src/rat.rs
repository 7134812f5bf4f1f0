//! Exact rational numbers.
//!
//! `Rat` wraps an arbitrary-precision `BigRational` kept in lowest terms. Every
//! coordinate, height and bound in the crate is a `Rat`; nothing is ever
//! rounded except when rendering.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::FanError;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    /// `2^exp` for any signed exponent.
    pub fn pow2(exp: i64) -> Self {
        let one = BigInt::one();
        if exp >= 0 {
            Rat(BigRational::from_integer(one << (exp as usize)))
        } else {
            Rat(BigRational::new_raw(one.clone(), one << ((-exp) as usize)))
        }
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

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn half(&self) -> Rat {
        self * &Rat::new(1, 2)
    }

    /// Midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Rat) -> Rat {
        (self + other).half()
    }

    /// Exact test `self < 2^exp` without materialising `2^exp` when the
    /// magnitudes are far apart.
    pub fn lt_pow2(&self, exp: i64) -> bool {
        self.cmp_pow2(exp) == std::cmp::Ordering::Less
    }

    pub fn cmp_pow2(&self, exp: i64) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        if !self.is_positive() {
            return Ordering::Less;
        }
        let p = self.numer();
        let q = self.denom();
        // 2^(bits-1) <= p < 2^bits, so log2(p/q) lies in (bp - bq - 1, bp - bq + 1).
        let bp = p.bits() as i64;
        let bq = q.bits() as i64;
        if bp - bq < exp {
            return Ordering::Less;
        }
        if bp - bq > exp {
            return Ordering::Greater;
        }
        if exp >= 0 {
            p.cmp(&(q << (exp as usize)))
        } else {
            (p << ((-exp) as usize)).cmp(q)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn min<'a>(&'a self, other: &'a Rat) -> &'a Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max<'a>(&'a self, other: &'a Rat) -> &'a Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn signum(&self) -> Sign {
        self.numer().sign()
    }
}

impl fmt::Display for Rat {
    /// Always `p/q`, including integers (`1/1`, `0/1`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = FanError;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || FanError::Parse(format!("invalid rational `{s}`"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = n.parse().map_err(|_| bad())?;
        let den: BigInt = d.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Rat::from_big(num, den))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a, 'b> $tr<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'b Rat) -> Rat {
                Rat(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0 $op rhs.0)
            }
        }
        impl<'b> $tr<&'b Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'b Rat) -> Rat {
                Rat(self.0 $op &rhs.0)
            }
        }
        impl<'a> $tr<Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(&self.0 $op rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);
forward_binop!(Div, div, /);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}
