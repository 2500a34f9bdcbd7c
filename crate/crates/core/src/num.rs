//! Exact scalar support.
//!
//! Every geometric decision in this crate is made on integers or rationals;
//! floating point only ever appears in reports. The scalar backing those
//! integers is generic: [`GridInt`] is satisfied by `i128` (fast, overflows
//! loudly as [`Error::ArithmeticOverflow`]) and by `num_bigint::BigInt`
//! (never overflows). All arithmetic goes through checked operations; there
//! is deliberately no `Add`/`Mul` sugar on [`Frac`] so a silently wrapping
//! path cannot be written by accident.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Signed exact integer scalar used for box corners and rational arithmetic.
pub trait GridInt:
    Integer
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Clone
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl<T> GridInt for T where
    T: Integer
        + Signed
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + FromStr
        + Clone
        + Hash
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

pub fn from_u32<T: GridInt>(v: u32) -> Result<T> {
    T::from_u32(v).ok_or(Error::ArithmeticOverflow)
}

pub fn add<T: GridInt>(a: &T, b: &T) -> Result<T> {
    a.checked_add(b).ok_or(Error::ArithmeticOverflow)
}

pub fn sub<T: GridInt>(a: &T, b: &T) -> Result<T> {
    a.checked_sub(b).ok_or(Error::ArithmeticOverflow)
}

pub fn mul<T: GridInt>(a: &T, b: &T) -> Result<T> {
    a.checked_mul(b).ok_or(Error::ArithmeticOverflow)
}

/// `base^exp` by binary exponentiation, all multiplications checked.
pub fn pow<T: GridInt>(base: u32, exp: u32) -> Result<T> {
    let mut acc = T::one();
    let mut sq: T = from_u32(base)?;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &sq)?;
        }
        e >>= 1;
        if e > 0 {
            sq = mul(&sq, &sq)?;
        }
    }
    Ok(acc)
}

/// Largest `l` with `a^l <= b^k`, decided by exact integer comparison.
/// Both bases must be >= 2. Never overflows: computed on `BigUint`.
pub fn floor_log_pow(a: u32, b: u32, k: u32) -> u32 {
    debug_assert!(a >= 2 && b >= 2);
    let target = BigUint::from(b).pow(k);
    let a = BigUint::from(a);
    let mut p = a.clone();
    let mut l = 0u32;
    while p <= target {
        l += 1;
        p *= &a;
    }
    l
}

/// Exact nonnegative-denominator rational in lowest terms.
///
/// The API is deliberately checked-only. Comparison uses the continued
/// fraction descent (division only) and cannot overflow for any scalar.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frac<T> {
    num: T,
    den: T,
}

impl<T: GridInt> Frac<T> {
    pub fn new(num: T, den: T) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidCertificate {
                reason: "zero denominator".into(),
            });
        }
        let (mut num, mut den) = if den < T::zero() {
            (T::zero() - num, T::zero() - den)
        } else {
            (num, den)
        };
        let g = num.gcd(&den);
        if !g.is_zero() && !g.is_one() {
            num = num / g.clone();
            den = den / g;
        }
        Ok(Frac { num, den })
    }

    pub fn from_int(v: T) -> Self {
        Frac { num: v, den: T::one() }
    }

    pub fn zero() -> Self {
        Frac { num: T::zero(), den: T::one() }
    }

    pub fn one() -> Self {
        Frac { num: T::one(), den: T::one() }
    }

    /// `base^{-exp}` as a rational.
    pub fn inv_pow(base: u32, exp: u32) -> Result<Self> {
        Ok(Frac { num: T::one(), den: pow(base, exp)? })
    }

    pub fn numer(&self) -> &T {
        &self.num
    }

    pub fn denom(&self) -> &T {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num < T::zero()
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let a = mul(&self.num, &rhs.den)?;
        let b = mul(&rhs.num, &self.den)?;
        Frac::new(add(&a, &b)?, mul(&self.den, &rhs.den)?)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        let a = mul(&self.num, &rhs.den)?;
        let b = mul(&rhs.num, &self.den)?;
        Frac::new(sub(&a, &b)?, mul(&self.den, &rhs.den)?)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        Frac::new(mul(&self.num, &rhs.num)?, mul(&self.den, &rhs.den)?)
    }

    pub fn square(&self) -> Result<Self> {
        self.checked_mul(self)
    }

    pub fn is_positive(&self) -> bool {
        self.num > T::zero()
    }

    /// Errors on a zero divisor as well as on overflow.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::ArithmeticOverflow);
        }
        Frac::new(mul(&self.num, &rhs.den)?, mul(&self.den, &rhs.num)?)
    }

    /// Reporting only; never used in a decision.
    pub fn to_f64(&self) -> f64 {
        match (self.num.to_f64(), self.den.to_f64()) {
            (Some(n), Some(d)) => n / d,
            _ => f64::NAN,
        }
    }
}

impl<T: GridInt> PartialOrd for Frac<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: GridInt> Ord for Frac<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_parts(&self.num, &self.den, &other.num, &other.den)
    }
}

/// Compare `an/ad` with `bn/bd` (`ad, bd > 0`) without multiplying.
fn cmp_parts<T: GridInt>(an: &T, ad: &T, bn: &T, bd: &T) -> Ordering {
    let (q1, r1) = an.div_mod_floor(ad);
    let (q2, r2) = bn.div_mod_floor(bd);
    match q1.cmp(&q2) {
        Ordering::Equal => {}
        ord => return ord,
    }
    match (r1.is_zero(), r2.is_zero()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        // r1/ad vs r2/bd with both in (0,1): compare reciprocals, reversed.
        (false, false) => cmp_parts(bd, &r2, ad, &r1),
    }
}

impl<T: GridInt> fmt::Display for Frac<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl<T: GridInt> fmt::Debug for Frac<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<T: GridInt> FromStr for Frac<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |p: &str| {
            p.trim()
                .parse::<T>()
                .map_err(|_| Error::MalformedReport { reason: format!("bad rational `{s}`") })
        };
        match s.split_once('/') {
            Some((n, d)) => Frac::new(parse(n)?, parse(d)?),
            None => Ok(Frac::from_int(parse(s)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn pow_matches_u128_reference() {
        for (b, e) in [(2u32, 10u32), (3, 7), (5, 3), (7, 0)] {
            let got: i128 = pow(b, e).unwrap();
            assert_eq!(got, (b as i128).pow(e));
        }
    }

    #[test]
    fn pow_overflow_is_loud() {
        assert_eq!(pow::<i128>(10, 60), Err(Error::ArithmeticOverflow));
        // The same power is fine on BigInt.
        let big: BigInt = pow(10, 60).unwrap();
        assert_eq!(big.to_string().len(), 61);
    }

    #[test]
    fn floor_log_pow_against_pow_oracle() {
        // Independent check: verify a^l <= b^k < a^(l+1) using BigUint::pow.
        for (a, b, k) in [(2u32, 3u32, 5u32), (3, 2, 7), (2, 2, 9), (5, 3, 4), (4, 36, 3)] {
            let l = floor_log_pow(a, b, k);
            let target = BigUint::from(b).pow(k);
            assert!(BigUint::from(a).pow(l) <= target);
            assert!(BigUint::from(a).pow(l + 1) > target);
        }
    }

    #[test]
    fn frac_reduces_and_normalizes_sign() {
        let f = Frac::new(4i128, -6).unwrap();
        assert_eq!((f.numer(), f.denom()), (&-2, &3));
        assert_eq!(f.to_string(), "-2/3");
        assert_eq!(Frac::new(0i128, 5).unwrap(), Frac::zero());
    }

    #[test]
    fn frac_cmp_without_overflow() {
        // Numerators near the i128 boundary: naive cross multiplication
        // would overflow, the continued fraction descent must not.
        let big = i128::MAX / 2;
        let a = Frac::new(big, big - 1).unwrap();
        let b = Frac::new(big - 1, big - 2).unwrap();
        assert!(a < b);
        assert_eq!(a.cmp(&a), Ordering::Equal);
        assert!(Frac::new(1i128, 3).unwrap() < Frac::new(2i128, 5).unwrap());
        assert!(Frac::new(-1i128, 3).unwrap() < Frac::new(1i128, 7).unwrap());
    }

    #[test]
    fn frac_checked_ops() {
        let third = Frac::new(1i128, 3).unwrap();
        let ninth = third.square().unwrap();
        assert_eq!(ninth, Frac::new(1, 9).unwrap());
        let sum = third.checked_add(&ninth).unwrap();
        assert_eq!(sum, Frac::new(4, 9).unwrap());
        assert_eq!(third.checked_sub(&third).unwrap(), Frac::zero());
        let huge = Frac::new(i128::MAX, 1).unwrap();
        assert_eq!(huge.checked_add(&huge), Err(Error::ArithmeticOverflow));
    }

    #[test]
    fn frac_roundtrips_through_strings() {
        for s in ["2/3", "-7/9", "5", "0"] {
            let f: Frac<i128> = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
            let g: Frac<BigInt> = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert_eq!("4/6".parse::<Frac<i128>>().unwrap().to_string(), "2/3");
        assert!("1/0".parse::<Frac<i128>>().is_err());
    }
}
