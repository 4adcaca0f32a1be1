//! Liouville's inequality `|x - p/q| > y / q^n` for a real algebraic `x` of
//! degree `n`, with `y = min(1, 1/w)` and `w` bounding `|P'|` on `[x-1, x+1]`.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::creal::{compare_big, compare_certain, CReal, Comparison};
use crate::error::{Error, Result};
use crate::exact::{from_big, min_rat};
use crate::ucfun::{bound, poly, Domain, Interval};

fn eval_poly(p: &[BigInt], x: &CReal) -> CReal {
    p.iter().rev().fold(CReal::zero(), |acc, c| acc.mul(x).add(&CReal::from_rational(from_big(c.clone()))))
}

fn degree(p: &[BigInt]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// Precision for the grid bound of `|P'|`.
const BOUND_K: u64 = 100;

/// `y = min(1, 1/w)`; `P` lists coefficients lowest first.
pub fn liouville_constant(p: &[BigInt], root: &CReal, k: u64) -> Result<BigRational> {
    if degree(p) < 2 {
        return Err(Error::Precondition("Liouville's inequality needs degree n >= 2".into()));
    }
    if compare_big(&eval_poly(p, root), &CReal::zero(), &k.max(1).into()) != Comparison::Within {
        return Err(Error::Precondition("root is not certifiably a zero of P".into()));
    }
    let dp: Vec<CReal> =
        p.iter().enumerate().skip(1).map(|(i, c)| CReal::from_rational(from_big(c * BigInt::from(i)))).collect();
    let dom: Domain = Interval::new(root.sub(&CReal::one()), root.add(&CReal::one()))?.into();
    let w = bound(poly(dp, dom)?.as_uc(), BOUND_K)?;
    Ok(min_rat(&BigRational::one(), &w.recip()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleStatus {
    /// `|x - p/q| > y/q^n` certified.
    Pass,
    /// Comparison undecided at the precision cap.
    Undecided,
    /// `|x - p/q| < y/q^n` certified.
    Violation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub q: BigRational,
    /// `|x - p/q|`, approximated.
    pub lhs: BigRational,
    /// `y / q^n`.
    pub rhs: BigRational,
    pub status: SampleStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleWitness {
    pub poly: Vec<BigInt>,
    pub degree: usize,
    pub y: BigRational,
    pub samples: Vec<Sample>,
}

impl LiouvilleWitness {
    pub fn all_pass(&self) -> bool {
        self.samples.iter().all(|s| s.status == SampleStatus::Pass)
    }
}

/// Certifies the inequality for each sample fraction.
pub fn liouville_check(p: &[BigInt], root: &CReal, y: &BigRational, samples: &[BigRational]) -> LiouvilleWitness {
    let n = degree(p);
    let samples = samples
        .iter()
        .map(|s| {
            let dist = root.sub(&CReal::from_rational(s.clone())).abs();
            let rhs = y / num::pow(BigRational::from_integer(s.denom().clone()), n);
            let max_bits = 64 + 4 * n as u32 * s.denom().bits() as u32;
            let status = match compare_certain(&dist, &CReal::from_rational(rhs.clone()), max_bits) {
                Some(Comparison::Greater) => SampleStatus::Pass,
                Some(Comparison::Less) => SampleStatus::Violation,
                _ => SampleStatus::Undecided,
            };
            let lhs = dist.approx_bits(max_bits.min(256));
            Sample { q: s.clone(), lhs, rhs, status }
        })
        .collect();
    LiouvilleWitness { poly: p.to_vec(), degree: n, y: y.clone(), samples }
}

fn eval_rat(p: &[BigInt], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
}

/// Root of `P` in `[lo, hi]` by bisection; `P(lo)` and `P(hi)` must have
/// opposite signs.
pub fn bisect_root(p: &[BigInt], lo: &BigRational, hi: &BigRational) -> Result<CReal> {
    let (slo, shi) = (eval_rat(p, lo).signum(), eval_rat(p, hi).signum());
    if slo.is_zero() || shi.is_zero() || slo == shi {
        return Err(Error::Precondition("P must change sign strictly inside the bracket".into()));
    }
    let (p, lo, hi) = (p.to_vec(), lo.clone(), hi.clone());
    Ok(CReal::from_fn(move |b| {
        let (mut a, mut c) = (lo.clone(), hi.clone());
        let eps = crate::exact::two_pow_neg(b + 1);
        while &c - &a > eps {
            let mid = (&a + &c) / BigRational::from_integer(2.into());
            let s = eval_rat(&p, &mid).signum();
            if s.is_zero() {
                return mid;
            }
            if s == slo {
                a = mid;
            } else {
                c = mid;
            }
        }
        (a + c) / BigRational::from_integer(2.into())
    }))
}

/// Largest real root of `P` at which `P` changes sign.
pub fn largest_real_root(p: &[BigInt]) -> Result<CReal> {
    let n = degree(p);
    if p[n].is_zero() {
        return Err(Error::Precondition("zero polynomial".into()));
    }
    let lead = BigRational::from_integer(p[n].abs());
    let bound = p[..n].iter().map(|c| BigRational::from_integer(c.abs()) / &lead).max().unwrap_or_default();
    let top: BigInt = bound.ceil().to_integer() + 1;
    let mut j = top.clone();
    let mut prev = eval_rat(p, &BigRational::from_integer(j.clone()));
    while j > -&top {
        let jm: BigInt = &j - 1;
        let cur = eval_rat(p, &BigRational::from_integer(jm.clone()));
        if cur.is_zero() {
            return Ok(CReal::from_rational(BigRational::from_integer(jm)));
        }
        if cur.signum() != prev.signum() {
            return bisect_root(p, &BigRational::from_integer(jm), &BigRational::from_integer(j));
        }
        (j, prev) = (jm, cur);
    }
    Err(Error::Precondition("P has no real root of odd multiplicity".into()))
}

/// Continued fraction convergents of a rational approximation of `x` at
/// `bits` of precision. Later convergents can be artifacts of the
/// approximation; they remain valid test fractions.
pub fn convergents(x: &CReal, count: usize, bits: u32) -> Vec<BigRational> {
    let mut v = x.approx_bits(bits);
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::new();
    for _ in 0..count {
        let a = v.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        out.push(BigRational::new(h2.clone(), k2.clone()));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = &v - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        v = frac.recip();
    }
    out
}

/// `P` scaled by an integer.
pub fn scale_poly(p: &[BigInt], c: i64) -> Vec<BigInt> {
    p.iter().map(|x| x * BigInt::from(c)).collect()
}
