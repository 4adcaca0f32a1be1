//! Liouville's number `lambda = sum_{n >= 1} 2^(-n!)`.

use num::{BigInt, BigRational, BigUint, One, Zero};

use crate::creal::CReal;
use crate::error::{Error, Result};
use crate::exact::{dyadic, factorial, from_biguint, pow2, rat};

/// Largest `m` for which approximations are built.
pub const MAX_M: u32 = 6;

fn fact(n: u32) -> u32 {
    factorial(n as u64).try_into().expect("small factorial")
}

/// `lambda` as a real.
pub fn lambda() -> CReal {
    CReal::from_fn(|b| {
        // terms with n! > b + 1 sum to at most 2^-(b+1)
        let mut s = BigRational::zero();
        let mut n = 1u32;
        loop {
            let e = factorial(n as u64);
            if e > BigUint::from(b + 1) {
                break;
            }
            s += dyadic(BigInt::one(), e.try_into().unwrap());
            n += 1;
        }
        s
    })
}

/// `(k_m, l_m)` with `k_m / l_m = sum_{n <= m} 2^(-n!)` and `l_m = 2^(m!)`.
pub fn lambda_approx(m: u32) -> Result<(BigUint, BigUint)> {
    if m == 0 {
        return Err(Error::Precondition("m >= 1".into()));
    }
    if m > MAX_M {
        return Err(Error::Resource(format!("lambda approximations are capped at m = {MAX_M}")));
    }
    let mf = fact(m);
    let k = (1..=m).map(|n| pow2(mf - fact(n))).sum();
    Ok((k, pow2(mf)))
}

/// `|lambda - k_m/l_m| <= 1/l_m^m`, checked exactly through the bound
/// `sum_{n > m} 2^(-n!) <= 2 * 2^(-(m+1)!)`.
pub fn lambda_error_certified(m: u32) -> bool {
    let lhs = BigRational::new(BigInt::from(2u32), BigInt::from(pow2(fact(m + 1))));
    let rhs = BigRational::new(BigInt::one(), BigInt::from(pow2(fact(m) * m)));
    lhs <= rhs
}

/// Smallest `m <= 6` with `m > d` and `1/l_m^(m-d) < y`.
pub fn lambda_witness(d: u32, y: &BigRational) -> Result<u32> {
    if d < 2 {
        return Err(Error::Precondition("degree d >= 2".into()));
    }
    if *y <= BigRational::zero() {
        return Err(Error::Precondition("y > 0".into()));
    }
    for m in d + 1..=MAX_M {
        let lhs = BigRational::new(BigInt::one(), BigInt::from(pow2(fact(m) * (m - d))));
        if lhs < *y {
            return Ok(m);
        }
    }
    Err(Error::Resource(format!("no m <= {MAX_M} satisfies 1/l_m^(m-d) < y")))
}

/// Rational bounds `(lo, hi)` on `sum_{n > l} l 2^(l! - n!)`: three exact
/// terms, then the remainder at most twice its first term.
pub fn lambda_tail_bounds(l: u32) -> (BigRational, BigRational) {
    let lf = fact(l);
    let lq = BigRational::from_integer(BigInt::from(l));
    let term = |n: u32| &lq * BigRational::new(BigInt::one(), BigInt::from(pow2(fact(n) - lf)));
    let lo: BigRational = (l + 1..=l + 3).map(term).sum();
    let hi = &lo + term(l + 4) * rat(2, 1);
    (lo, hi)
}

pub fn lambda_rational(m: u32) -> Result<BigRational> {
    let (k, l) = lambda_approx(m)?;
    Ok(from_biguint(&k) / from_biguint(&l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::creal::{compare, Comparison};

    #[test]
    fn approximations() {
        assert_eq!(lambda_rational(1).unwrap(), rat(1, 2));
        assert_eq!(lambda_rational(2).unwrap(), rat(3, 4));
        let (_, l3) = lambda_approx(3).unwrap();
        assert_eq!(l3, BigUint::from(64u32));
        assert!(lambda_approx(7).is_err());
        for m in 1..=MAX_M {
            assert!(lambda_error_certified(m));
        }
        let gap = lambda().sub(&CReal::from_rational(lambda_rational(3).unwrap()));
        let bound = CReal::from_rational(BigRational::new(BigInt::one(), BigInt::from(64u32 * 64 * 64)));
        assert_ne!(compare(&gap.abs(), &bound, 1 << 30), Comparison::Greater);
    }

    #[test]
    fn witnesses() {
        assert_eq!(lambda_witness(2, &rat(1, 10)).unwrap(), 3);
        assert_eq!(lambda_witness(3, &rat(1, 1)).unwrap(), 4);
        assert!(lambda_witness(6, &rat(1, 10)).is_err());
    }

    #[test]
    fn tail_strictly_between_zero_and_one() {
        for l in 1..=3 {
            let (lo, hi) = lambda_tail_bounds(l);
            assert!(lo > BigRational::zero() && hi < BigRational::one(), "l={l}");
        }
    }
}
