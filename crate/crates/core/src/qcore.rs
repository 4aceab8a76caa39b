//! Exact nonnegative rationals and the small amount of elementary number
//! theory the rest of the crate needs.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A nonnegative rational number kept in lowest terms.
///
/// `numer()` and `denom()` are the usual n(q) and d(q): coprime, with the
/// denominator at least one.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<BigUint>);

impl Rational {
    /// Builds `p/q` from signed integers, rejecting a zero denominator and
    /// negative values.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let p = p.into();
        let q = q.into();
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if !p.is_zero() && p.sign() != q.sign() {
            return Err(Error::NegativeValue(format!("{p}/{q}")));
        }
        let (_, p) = p.into_parts();
        let (_, q) = q.into_parts();
        Ok(Rational(Ratio::new(p, q)))
    }

    pub fn from_parts(p: BigUint, q: BigUint) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(Ratio::new(p, q)))
    }

    pub fn integer(n: impl Into<BigUint>) -> Self {
        Rational(Ratio::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(Ratio::zero())
    }

    pub fn one() -> Self {
        Rational(Ratio::one())
    }

    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Exact power; `b^0 = 1`.
    pub fn pow(&self, e: u32) -> Self {
        Rational(Ratio::new_raw(
            num_traits::pow(self.numer().clone(), e as usize),
            num_traits::pow(self.denom().clone(), e as usize),
        ))
    }

    pub fn checked_sub(&self, other: &Rational) -> Option<Rational> {
        if other > self {
            None
        } else {
            Some(Rational(&self.0 - &other.0))
        }
    }

    pub fn mul_u64(&self, c: u64) -> Rational {
        Rational(&self.0 * Ratio::from_integer(BigUint::from(c)))
    }

    /// The value as an integer, when it is one.
    pub fn to_integer(&self) -> Option<BigUint> {
        self.is_integer().then(|| self.numer().clone())
    }

    pub fn floor(&self) -> BigUint {
        self.numer() / self.denom()
    }

    pub fn ceil(&self) -> BigUint {
        self.numer().div_ceil(self.denom())
    }

    pub fn to_signed(&self) -> Ratio<BigInt> {
        Ratio::new_raw(
            BigInt::from_biguint(Sign::Plus, self.numer().clone()),
            BigInt::from_biguint(Sign::Plus, self.denom().clone()),
        )
    }

    /// Converts back from a signed ratio; `None` when negative.
    pub fn from_signed(r: &Ratio<BigInt>) -> Option<Rational> {
        let n = r.numer().to_biguint()?;
        let d = r.denom().to_biguint()?;
        Some(Rational(Ratio::new(n, d)))
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

    /// Accepts `"n/d"` or a bare integer `"n"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let t = s.trim();
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        Rational::new(p, q)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::integer(n)
    }
}

/// Which kind of fraction a rational is, in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FractionClass {
    Zero,
    PositiveInteger,
    UnitFraction,
    ProperNonUnit,
    ImproperNonInteger,
}

pub fn classify_fraction(q: &Rational) -> FractionClass {
    let one = BigUint::one();
    if q.is_zero() {
        FractionClass::Zero
    } else if *q.denom() == one {
        FractionClass::PositiveInteger
    } else if *q.numer() == one {
        FractionClass::UnitFraction
    } else if q.numer() < q.denom() {
        FractionClass::ProperNonUnit
    } else {
        FractionClass::ImproperNonInteger
    }
}

pub fn make_rational(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Rational> {
    Rational::new(p, q)
}

pub fn rational_pow(b: &Rational, e: u32) -> Rational {
    b.pow(e)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) || p.is_multiple_of(3) {
        return false;
    }
    let mut i = 5u64;
    while i.saturating_mul(i) <= p {
        if p.is_multiple_of(i) || p.is_multiple_of(i + 2) {
            return false;
        }
        i += 6;
    }
    true
}

/// Largest `e` with `p^e | n`.
pub fn p_adic_valuation(n: &BigUint, p: u64) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Ok(e);
        }
        n = q;
        e += 1;
    }
}

/// Prime factorization by trial division over a 2-3 wheel.
///
/// Only ever applied to generator denominators, which are small; a cofactor
/// left over after the trial bound is returned as-is and is prime.
pub fn prime_factors(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut n = n.clone();
    let mut take = |n: &mut BigUint, p: u64| {
        let pb = BigUint::from(p);
        let mut e = 0;
        while (&*n % &pb).is_zero() {
            *n /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((pb, e));
        }
    };
    take(&mut n, 2);
    take(&mut n, 3);
    let mut p = 5u64;
    loop {
        let sq = BigUint::from(p) * BigUint::from(p);
        if sq > n {
            break;
        }
        take(&mut n, p);
        take(&mut n, p + 2);
        p += 6;
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

/// The smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut p = n + 1;
    while !is_prime(p) {
        p += 1;
    }
    p
}

pub(crate) fn to_u64(n: &BigUint) -> Result<u64> {
    n.to_u64().ok_or(Error::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn make_rational_reduces() {
        assert_eq!(make_rational(4, 6).unwrap().to_string(), "2/3");
        assert_eq!(make_rational(0, 5).unwrap().to_string(), "0/1");
        assert_eq!(make_rational(10, 2).unwrap().to_string(), "5/1");
        assert_eq!(make_rational(-4, -6).unwrap().to_string(), "2/3");
    }

    #[test]
    fn make_rational_errors() {
        assert_eq!(make_rational(1, 0), Err(Error::ZeroDenominator));
        assert!(matches!(make_rational(-1, 2), Err(Error::NegativeValue(_))));
        assert!(matches!(make_rational(1, -2), Err(Error::NegativeValue(_))));
    }

    #[test]
    fn classify() {
        assert_eq!(classify_fraction(&q("2/3")), FractionClass::ProperNonUnit);
        assert_eq!(classify_fraction(&q("1/2")), FractionClass::UnitFraction);
        assert_eq!(classify_fraction(&q("5/2")), FractionClass::ImproperNonInteger);
        assert_eq!(classify_fraction(&q("0")), FractionClass::Zero);
        assert_eq!(classify_fraction(&q("7")), FractionClass::PositiveInteger);
    }

    #[test]
    fn valuations() {
        let v = |n: u64, p| p_adic_valuation(&BigUint::from(n), p);
        assert_eq!(v(12, 2), Ok(2));
        assert_eq!(v(12, 5), Ok(0));
        assert_eq!(v(121, 11), Ok(2));
        assert_eq!(v(12, 4), Err(Error::NotPrime(4)));
        assert_eq!(v(0, 2), Err(Error::ZeroArgument));
    }

    #[test]
    fn powers() {
        assert_eq!(rational_pow(&q("2/3"), 0), Rational::one());
        assert_eq!(rational_pow(&q("2/3"), 2), q("4/9"));
        assert_eq!(rational_pow(&q("6/5"), 3), q("216/125"));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(q("5"), q("5/1"));
        assert_eq!(q(" 10/4 ").to_string(), "5/2");
        assert!(matches!("2/x".parse::<Rational>(), Err(Error::Parse(_))));
        assert!(matches!("".parse::<Rational>(), Err(Error::Parse(_))));
    }

    #[test]
    fn factor_small() {
        let f = prime_factors(&BigUint::from(360u32));
        let f: Vec<_> = f.into_iter().map(|(p, e)| (p.to_u64().unwrap(), e)).collect();
        assert_eq!(f, vec![(2, 3), (3, 2), (5, 1)]);
        let f = prime_factors(&BigUint::from(999_983u32 * 7));
        assert_eq!(f.len(), 2);
        assert!(prime_factors(&BigUint::one()).is_empty());
    }

    proptest! {
        #[test]
        fn normalization_is_exact(p in 0i64..10_000, q in 1i64..10_000) {
            let r = make_rational(p, q).unwrap();
            // r == p/q  <=>  n(r)*q == p*d(r)
            prop_assert_eq!(r.numer() * BigUint::from(q as u64), BigUint::from(p as u64) * r.denom());
            prop_assert!(r.numer().gcd(r.denom()).is_one());
            let again = Rational::from_parts(r.numer().clone(), r.denom().clone()).unwrap();
            prop_assert_eq!(again, r);
        }

        #[test]
        fn pow_is_additive(n in 1u64..50, d in 1u64..50, e1 in 0u32..6, e2 in 0u32..6) {
            let b = make_rational(n, d).unwrap();
            prop_assert_eq!(b.pow(e1 + e2), &b.pow(e1) * &b.pow(e2));
        }

        #[test]
        fn valuation_is_additive(n in 1u64..100_000, m in 1u64..100_000, pi in 0usize..6) {
            let p = [2u64, 3, 5, 7, 11, 13][pi];
            let v = |x: u64| p_adic_valuation(&BigUint::from(x), p).unwrap();
            let vnm = p_adic_valuation(&(BigUint::from(n) * BigUint::from(m)), p).unwrap();
            prop_assert_eq!(vnm, v(n) + v(m));
        }
    }
}
