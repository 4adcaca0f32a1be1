//! Exact integer and rational arithmetic helpers on top of `num`.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    assert!(d != 0, "zero denominator");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_big(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

pub fn from_biguint(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// Multiplicative inverse, refusing zero.
pub fn checked_inv(x: &BigRational) -> Result<BigRational> {
    if x.is_zero() {
        Err(Error::DivisionByZero)
    } else {
        Ok(x.recip())
    }
}

pub fn checked_div(x: &BigRational, y: &BigRational) -> Result<BigRational> {
    Ok(x * checked_inv(y)?)
}

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Binomial coefficient; zero when `m > n`.
pub fn binomial(n: u64, m: u64) -> BigUint {
    if m > n {
        return BigUint::zero();
    }
    let m = m.min(n - m);
    let mut acc = BigUint::one();
    for i in 0..m {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn pow2(bits: u32) -> BigUint {
    BigUint::one() << bits as usize
}

/// Smallest `b` with `2^b >= k` (zero for `k <= 1`).
pub fn ceil_log2(k: &BigUint) -> u32 {
    if k <= &BigUint::one() {
        0
    } else {
        (k - 1u32).bits() as u32
    }
}

/// Smallest `b >= 0` with `2^b >= |q|`.
pub fn ceil_log2_rat(q: &BigRational) -> u32 {
    let c = ceil(&q.abs());
    ceil_log2(&c.to_biguint().unwrap_or_default())
}

pub fn floor(q: &BigRational) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn ceil(q: &BigRational) -> BigInt {
    -((-q.numer()).div_floor(q.denom()))
}

/// `ceil(q)` as a positive integer, at least one.
pub fn ceil_pos(q: &BigRational) -> BigUint {
    let c = ceil(q);
    if c.sign() == Sign::Plus {
        c.to_biguint().unwrap()
    } else {
        BigUint::one()
    }
}

/// Nearest multiple of `2^-bits`; the error is at most `2^-(bits+1)`.
pub fn round_to_bits(q: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::from(pow2(bits));
    let num: BigInt = q.numer() * &scale * 2 + q.denom();
    let n = num.div_floor(&(q.denom() * 2));
    BigRational::new(n, scale)
}

pub fn dyadic(n: BigInt, bits: u32) -> BigRational {
    BigRational::new(n, BigInt::from(pow2(bits)))
}

pub fn two_pow_neg(bits: u32) -> BigRational {
    dyadic(BigInt::one(), bits)
}

pub fn min_rat(a: &BigRational, b: &BigRational) -> BigRational {
    if a <= b { a.clone() } else { b.clone() }
}

pub fn max_rat(a: &BigRational, b: &BigRational) -> BigRational {
    if a >= b { a.clone() } else { b.clone() }
}

/// Parse `p/q` or `p`. Rejects a zero denominator.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

/// `p/q` in lowest terms, or `p` for integers.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `floor(q * 10^d) / 10^d` written in positional notation.
pub fn format_decimal_floor(q: &BigRational, d: usize) -> String {
    let scale = BigInt::from(10u32).pow(d as u32);
    let n = floor(&(q * BigRational::from_integer(scale)));
    decimal_from_scaled(&n, d)
}

pub(crate) fn decimal_from_scaled(n: &BigInt, d: usize) -> String {
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let digits = if digits.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (ip, fp) = digits.split_at(digits.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{fp}")
    }
}

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Precondition("interval with lo > hi".into()));
        }
        Ok(RatInterval { lo, hi })
    }

    pub fn point(q: BigRational) -> Self {
        RatInterval { lo: q.clone(), hi: q }
    }

    /// `[c - r, c + r]`.
    pub fn ball(c: &BigRational, r: &BigRational) -> Self {
        let r = r.abs();
        RatInterval { lo: c - &r, hi: c + &r }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// Largest absolute value over the interval.
    pub fn mag(&self) -> BigRational {
        max_rat(&self.lo.abs(), &self.hi.abs())
    }

    pub fn add(&self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &RatInterval) -> RatInterval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    /// Certain ordering against a rational, if the interval does not straddle it.
    pub fn cmp_rat(&self, q: &BigRational) -> Option<Ordering> {
        if &self.hi < q {
            Some(Ordering::Less)
        } else if &self.lo > q {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(&rat(1, 2) + &rat(1, 3), rat(5, 6));
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(factorial(0), BigUint::one());
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(checked_inv(&int(0)), Err(Error::DivisionByZero));
        assert_eq!(checked_inv(&rat(-2, 3)).unwrap(), rat(-3, 2));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&int(-5)), "-5");
    }

    #[test]
    fn log2_and_rounding() {
        assert_eq!(ceil_log2(&BigUint::from(1u32)), 0);
        assert_eq!(ceil_log2(&BigUint::from(2u32)), 1);
        assert_eq!(ceil_log2(&BigUint::from(5u32)), 3);
        assert_eq!(ceil_log2(&BigUint::from(8u32)), 3);
        let q = rat(1, 3);
        let r = round_to_bits(&q, 10);
        assert!((&r - &q).abs() <= two_pow_neg(11));
        assert_eq!(round_to_bits(&rat(-5, 8), 2), rat(-1, 2));
    }

    #[test]
    fn decimal_floor() {
        assert_eq!(format_decimal_floor(&rat(27182818, 10000000), 4), "2.7182");
        assert_eq!(format_decimal_floor(&rat(1, 20), 3), "0.050");
        assert_eq!(format_decimal_floor(&rat(-1, 3), 2), "-0.34");
    }

    #[test]
    fn interval_ops() {
        let a = RatInterval::new(int(-1), int(2)).unwrap();
        let b = RatInterval::new(int(3), int(4)).unwrap();
        assert_eq!(a.mul(&b), RatInterval::new(int(-4), int(8)).unwrap());
        assert_eq!(a.add(&b).width(), int(4));
        assert!(RatInterval::new(int(1), int(0)).is_err());
        assert_eq!(a.cmp_rat(&int(3)), Some(Ordering::Less));
    }
}
