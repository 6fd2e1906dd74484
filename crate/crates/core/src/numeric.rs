//! Exact rational arithmetic, the slope parameter, and a reproducible bit
//! source with exact-probability Bernoulli draws.
//!
//! Nothing in this crate touches floating point on a path that decides a
//! bit. [`Rational`] is a thin newtype over [`num_rational::BigRational`],
//! which keeps every value in lowest terms with a positive denominator.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};

/// An arbitrary-precision fraction, always in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`, reducing eagerly. Fails on a zero denominator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(Error::Parse {
                input: format!("{num}/0"),
                what: "a rational with nonzero denominator",
            });
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    /// Shorthand for small literals in code and tests. Panics on `den == 0`.
    pub fn frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn half() -> Self {
        Rational::frac(1, 2)
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

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// `self^exp` for a non-negative exponent.
    pub fn pow(&self, exp: u32) -> Self {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    /// Nearest `f64`, for reporting only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Storage cost in bits: bit-length of |numerator| plus bit-length of
    /// the denominator, with bit-length(0) = 0.
    pub fn bit_size(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// True when `0 <= self <= 1`.
    pub fn in_unit_closed(&self) -> bool {
        !self.is_negative() && self.numer() <= self.denom()
    }

    /// True when `0 <= self < 1`.
    pub fn in_unit_half_open(&self) -> bool {
        !self.is_negative() && self.numer() < self.denom()
    }
}

/// Free-function form of [`Rational::bit_size`].
pub fn rational_bit_size(r: &Rational) -> u64 {
    r.bit_size()
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            input: s.to_string(),
            what: "a rational \"num/den\"",
        };
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                Rational::new(n, d).map_err(|_| bad())
            }
            None => s
                .parse::<BigInt>()
                .map(Rational::from_integer)
                .map_err(|_| bad()),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
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

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl std::iter::Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

/// The slope `mu = c/d`, irreducible, with `1 < mu < 2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mu {
    c: u64,
    d: u64,
    value: Rational,
}

impl Mu {
    /// Reduces `c/d` and checks `1 < c/d < 2`.
    pub fn new(c: u64, d: u64) -> Result<Self> {
        let input = format!("{c}/{d}");
        if d == 0 {
            return Err(Error::InvalidMu {
                input,
                reason: "zero denominator",
            });
        }
        let g = c.gcd(&d);
        let (c, d) = (c / g, d / g);
        if !(d < c && c < 2 * d) {
            return Err(Error::InvalidMu {
                input,
                reason: "slope must satisfy 1 < c/d < 2",
            });
        }
        Ok(Mu {
            c,
            d,
            value: Rational::frac(c as i64, d as i64),
        })
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }
}

impl fmt::Display for Mu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.c, self.d)
    }
}

impl fmt::Debug for Mu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mu({}/{})", self.c, self.d)
    }
}

impl FromStr for Mu {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            input: s.to_string(),
            what: "a fraction \"c/d\"",
        };
        let (c, d) = s.trim().split_once('/').ok_or_else(bad)?;
        let c: u64 = c.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        Mu::new(c, d)
    }
}

/// A reproducible stream of fair bits, backed by SplitMix64.
///
/// Words are drawn 64 bits at a time and handed out most significant bit
/// first. The same seed always yields the same stream.
#[derive(Clone, Debug)]
pub struct BitSource {
    rng: SplitMix64,
    word: u64,
    left: u32,
    consumed: u64,
}

impl BitSource {
    pub fn new(seed: u64) -> Self {
        BitSource {
            rng: SplitMix64::seed_from_u64(seed),
            word: 0,
            left: 0,
            consumed: 0,
        }
    }

    pub fn next_bit(&mut self) -> bool {
        if self.left == 0 {
            self.word = self.rng.next_u64();
            self.left = 64;
        }
        self.left -= 1;
        self.consumed += 1;
        (self.word >> self.left) & 1 == 1
    }

    /// Total number of bits handed out so far.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    /// Derives an independent source, advancing this one by one word.
    pub fn split(&mut self) -> BitSource {
        BitSource::new(self.rng.next_u64())
    }
}

/// A probability prepared for repeated exact draws.
///
/// Sampling compares the source's bits one at a time against the binary
/// expansion of `p`, stopping at the first disagreement. Two bits are
/// consumed in expectation and only the current remainder is kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactBernoulli {
    num: BigUint,
    den: BigUint,
}

impl ExactBernoulli {
    pub fn new(p: &Rational) -> Result<Self> {
        if !p.in_unit_closed() {
            return Err(Error::domain(p, "[0, 1]"));
        }
        let num = p.numer().to_biguint().expect("non-negative");
        let den = p.denom().to_biguint().expect("positive");
        Ok(ExactBernoulli { num, den })
    }

    pub fn is_certain(&self) -> Option<bool> {
        if self.num.is_zero() {
            Some(false)
        } else if self.num == self.den {
            Some(true)
        } else {
            None
        }
    }

    /// Returns `true` with probability exactly `p`.
    pub fn sample(&self, src: &mut BitSource) -> bool {
        if let Some(b) = self.is_certain() {
            return b;
        }
        // Remainder r/den after emitting k digits of p.
        let mut r = self.num.clone();
        loop {
            r <<= 1usize;
            let p_digit = r >= self.den;
            if p_digit {
                r -= &self.den;
            }
            let u_digit = src.next_bit();
            if u_digit != p_digit {
                // U < p exactly when U has the 0 where p has the 1.
                return p_digit;
            }
            if r.is_zero() {
                // p's expansion terminates; U matches so far, so U >= p.
                return false;
            }
        }
    }

    pub fn probability(&self) -> Rational {
        Rational::new(
            BigInt::from_biguint(Sign::Plus, self.num.clone()),
            BigInt::from_biguint(Sign::Plus, self.den.clone()),
        )
        .expect("nonzero denominator")
    }
}

/// Draws a bit that is `true` with probability exactly `p`.
pub fn bernoulli_exact(p: &Rational, src: &mut BitSource) -> Result<bool> {
    Ok(ExactBernoulli::new(p)?.sample(src))
}

/// `min { m >= 0 : mu^m >= x }`, by integer power comparison `c^m >= x d^m`.
pub fn ceil_log_mu(mu: &Mu, x: &BigUint) -> u64 {
    let (c, d) = (BigUint::from(mu.c()), BigUint::from(mu.d()));
    let mut lhs = BigUint::one();
    let mut rhs = x.clone();
    let mut m = 0;
    while lhs < rhs {
        lhs *= &c;
        rhs *= &d;
        m += 1;
    }
    m
}
