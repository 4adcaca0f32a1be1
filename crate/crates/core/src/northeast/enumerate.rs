//! Enumeration `j -> a_j` of the rationals in `[0, 1]`: `a_1 = 0`, `a_2 = 1`,
//! then `x / (1 + x)` for the Calkin-Wilf sequence `x = 1, 1/2, 2, 1/3, ...`.

use num::{BigInt, BigRational, BigUint, One, Signed, Zero};

use crate::error::{Error, Result};

/// `n`-th term (from 1) of the Calkin-Wilf sequence, read off the binary
/// digits of `n` below the leading one: `0` is a left child `p/(p+q)`, `1` a
/// right child `(p+q)/q`.
pub fn calkin_wilf(n: &BigUint) -> BigRational {
    assert!(!n.is_zero(), "Calkin-Wilf index starts at 1");
    let (mut p, mut q) = (BigInt::one(), BigInt::one());
    let bits = n.bits();
    for i in (0..bits - 1).rev() {
        if n.bit(i) {
            p += &q;
        } else {
            q += &p;
        }
    }
    BigRational::new(p, q)
}

/// Position of a positive rational in the Calkin-Wilf sequence.
pub fn calkin_wilf_index(x: &BigRational) -> BigUint {
    assert!(x.is_positive());
    let (mut p, mut q) = (x.numer().clone(), x.denom().clone());
    // collect the path from the node up to the root as runs of equal bits
    let mut runs: Vec<(bool, BigUint)> = Vec::new();
    while p != q {
        if p < q {
            let steps = (&q - BigInt::one()) / &p;
            q -= &p * &steps;
            runs.push((false, steps.to_biguint().unwrap()));
        } else {
            let steps = (&p - BigInt::one()) / &q;
            p -= &q * &steps;
            runs.push((true, steps.to_biguint().unwrap()));
        }
    }
    let mut n = BigUint::one();
    for (bit, len) in runs.iter().rev() {
        let len: usize = len.try_into().expect("run length fits in memory");
        n <<= len;
        if *bit {
            n += (BigUint::one() << len) - BigUint::one();
        }
    }
    n
}

/// `a_j` for `j >= 1`.
pub fn enumerate_q01(j: &BigUint) -> BigRational {
    if j.is_zero() {
        panic!("enumeration starts at 1");
    }
    if j.is_one() {
        return BigRational::zero();
    }
    if *j == BigUint::from(2u32) {
        return BigRational::one();
    }
    let x = calkin_wilf(&(j - 2u32));
    &x / (&x + BigRational::one())
}

pub fn enumerate_q01_u64(j: u64) -> BigRational {
    enumerate_q01(&BigUint::from(j))
}

/// The `j` with `a_j = a`.
pub fn index_q01(a: &BigRational) -> Result<BigUint> {
    if a.is_negative() || *a > BigRational::one() {
        return Err(Error::Domain("point outside [0, 1]".into()));
    }
    if a.is_zero() {
        return Ok(BigUint::one());
    }
    if a.is_one() {
        return Ok(BigUint::from(2u32));
    }
    let x = a / (BigRational::one() - a);
    Ok(calkin_wilf_index(&x) + 2u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use std::collections::HashMap;

    #[test]
    fn first_terms() {
        let cw: Vec<BigRational> = (1..=7u32).map(|n| calkin_wilf(&BigUint::from(n))).collect();
        assert_eq!(cw, vec![rat(1, 1), rat(1, 2), rat(2, 1), rat(1, 3), rat(3, 2), rat(2, 3), rat(3, 1)]);
        assert_eq!(enumerate_q01_u64(1), rat(0, 1));
        assert_eq!(enumerate_q01_u64(2), rat(1, 1));
        assert_eq!(enumerate_q01_u64(3), rat(1, 2));
    }

    #[test]
    fn round_trip() {
        let mut seen = HashMap::new();
        for j in 1..=10_000u64 {
            let a = enumerate_q01_u64(j);
            assert!(a >= rat(0, 1) && a <= rat(1, 1));
            assert!(seen.insert(a.clone(), j).is_none());
            assert_eq!(index_q01(&a).unwrap(), BigUint::from(j));
        }
    }

    #[test]
    fn index_of_small_fraction_is_large() {
        assert_eq!(calkin_wilf_index(&rat(1, 10)), BigUint::from(512u32));
        assert!(index_q01(&rat(3, 2)).is_err());
    }
}
