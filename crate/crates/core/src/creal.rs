//! Computable reals.
//!
//! A [`CReal`] answers `approx(k)` with a rational within `1/k` of the value it
//! denotes. Internally precision is requested in bits: `approx_bits(b)` is
//! within `2^-b`. Results are cached per node, nodes are shared through `Arc`,
//! and exact rational leaves stay exact through `+`, `-` and `*`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num::{BigInt, BigRational, BigUint, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    ceil_log2, ceil_log2_rat, decimal_from_scaled, floor, from_biguint, int, pow2, round_to_bits,
    two_pow_neg,
};

/// Approximation procedure indexed by bits: `f(b)` must lie within `2^-b`.
pub type BitsFn = dyn Fn(u32) -> BigRational + Send + Sync;

#[derive(Clone)]
pub struct CReal(Arc<Node>);

struct Node {
    kind: Kind,
    cache: Mutex<BTreeMap<u32, BigRational>>,
}

enum Kind {
    Exact(BigRational),
    Add(CReal, CReal),
    Neg(CReal),
    Mul(CReal, CReal),
    Sum(Vec<CReal>),
    Abs(CReal),
    // |x| >= 2^-w
    Inv(CReal, u32),
    Func(Box<BitsFn>),
}

/// Three-valued comparison at a tolerance `1/k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Less,
    Within,
    Greater,
}

/// Evidence that `|x| >= 1/k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationWitness {
    k: BigUint,
}

impl SeparationWitness {
    /// Caller asserts `|x| >= 1/k`. A false claim makes `inverse` meaningless.
    pub fn trusted(k: BigUint) -> Self {
        assert!(!k.is_zero(), "witness k must be positive");
        SeparationWitness { k }
    }

    pub fn k(&self) -> &BigUint {
        &self.k
    }

    fn bits(&self) -> u32 {
        ceil_log2(&self.k)
    }
}

impl CReal {
    fn node(kind: Kind) -> CReal {
        CReal(Arc::new(Node { kind, cache: Mutex::new(BTreeMap::new()) }))
    }

    pub fn from_rational(q: BigRational) -> CReal {
        CReal::node(Kind::Exact(q))
    }

    pub fn from_int(n: i64) -> CReal {
        CReal::from_rational(int(n))
    }

    pub fn zero() -> CReal {
        CReal::from_int(0)
    }

    pub fn one() -> CReal {
        CReal::from_int(1)
    }

    /// Real given by a bits-indexed approximation procedure.
    pub fn from_fn(f: impl Fn(u32) -> BigRational + Send + Sync + 'static) -> CReal {
        CReal::node(Kind::Func(Box::new(f)))
    }

    /// Real given by a rational Cauchy sequence with modulus:
    /// `|seq(n) - x| <= 1/k` whenever `n >= modulus(k)`.
    pub fn from_cauchy(
        seq: impl Fn(usize) -> BigRational + Send + Sync + 'static,
        modulus: impl Fn(&BigUint) -> usize + Send + Sync + 'static,
    ) -> CReal {
        CReal::from_fn(move |b| seq(modulus(&pow2(b))))
    }

    /// Limit of a sequence of reals with modulus:
    /// `|xs(n) - x| <= 1/k` whenever `n >= modulus(k)`.
    pub fn limit(
        xs: impl Fn(usize) -> CReal + Send + Sync + 'static,
        modulus: impl Fn(&BigUint) -> usize + Send + Sync + 'static,
    ) -> CReal {
        CReal::from_fn(move |b| {
            let n = modulus(&pow2(b + 1));
            xs(n).approx_bits(b + 1)
        })
    }

    /// Exact value, when this node is a rational leaf.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0.kind {
            Kind::Exact(q) => Some(q),
            _ => None,
        }
    }

    /// Rational within `2^-b`.
    pub fn approx_bits(&self, b: u32) -> BigRational {
        if let Kind::Exact(q) = &self.0.kind {
            return q.clone();
        }
        {
            let cache = self.0.cache.lock().unwrap();
            if let Some(v) = cache.get(&b) {
                return v.clone();
            }
            if let Some((_, v)) = cache.range(b + 2..).next() {
                return round_to_bits(v, b + 1);
            }
        }
        let v = self.compute(b);
        self.0.cache.lock().unwrap().insert(b, v.clone());
        v
    }

    /// Rational within `1/k` (`k >= 1`).
    pub fn approx(&self, k: u64) -> BigRational {
        self.approx_bits(ceil_log2(&BigUint::from(k.max(1))))
    }

    pub fn approx_big(&self, k: &BigUint) -> BigRational {
        self.approx_bits(ceil_log2(k))
    }

    fn compute(&self, b: u32) -> BigRational {
        match &self.0.kind {
            Kind::Exact(q) => q.clone(),
            Kind::Add(x, y) => round_to_bits(&(x.approx_bits(b + 2) + y.approx_bits(b + 2)), b + 1),
            Kind::Neg(x) => -x.approx_bits(b),
            Kind::Abs(x) => x.approx_bits(b).abs(),
            Kind::Mul(x, y) => mul_approx(x, y, b),
            Kind::Sum(xs) => {
                let e = ceil_log2(&BigUint::from(xs.len().max(1)));
                let mut acc = BigRational::zero();
                for x in xs {
                    acc += x.approx_bits(b + 1 + e);
                }
                round_to_bits(&acc, b + 1)
            }
            Kind::Inv(x, w) => {
                let a = x.approx_bits(b + 2 + 2 * w);
                assert!(!a.is_zero(), "separation witness does not hold");
                round_to_bits(&a.recip(), b + 1)
            }
            Kind::Func(f) => f(b),
        }
    }

    pub fn add(&self, o: &CReal) -> CReal {
        match (self.as_rational(), o.as_rational()) {
            (Some(a), Some(b)) => CReal::from_rational(a + b),
            (Some(a), _) if a.is_zero() => o.clone(),
            (_, Some(b)) if b.is_zero() => self.clone(),
            _ => CReal::node(Kind::Add(self.clone(), o.clone())),
        }
    }

    pub fn neg(&self) -> CReal {
        match self.as_rational() {
            Some(a) => CReal::from_rational(-a),
            None => CReal::node(Kind::Neg(self.clone())),
        }
    }

    pub fn sub(&self, o: &CReal) -> CReal {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &CReal) -> CReal {
        match (self.as_rational(), o.as_rational()) {
            (Some(a), Some(b)) => CReal::from_rational(a * b),
            (Some(a), _) if a.is_zero() => CReal::zero(),
            (_, Some(b)) if b.is_zero() => CReal::zero(),
            (Some(a), _) if a.is_one() => o.clone(),
            (_, Some(b)) if b.is_one() => self.clone(),
            _ => CReal::node(Kind::Mul(self.clone(), o.clone())),
        }
    }

    pub fn scale(&self, q: &BigRational) -> CReal {
        self.mul(&CReal::from_rational(q.clone()))
    }

    pub fn abs(&self) -> CReal {
        match self.as_rational() {
            Some(a) => CReal::from_rational(a.abs()),
            None => CReal::node(Kind::Abs(self.clone())),
        }
    }

    /// `x^n` by repeated squaring.
    pub fn pow(&self, n: u32) -> CReal {
        if let Some(q) = self.as_rational() {
            return CReal::from_rational(num::pow(q.clone(), n as usize));
        }
        let mut result = CReal::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Sum of many reals as a single node.
    pub fn sum(xs: Vec<CReal>) -> CReal {
        if xs.iter().all(|x| x.as_rational().is_some()) {
            let s = xs.iter().fold(BigRational::zero(), |acc, x| acc + x.as_rational().unwrap());
            return CReal::from_rational(s);
        }
        CReal::node(Kind::Sum(xs))
    }

    /// `1/x`, given `|x| >= 1/k`. An approximation to `1/k` costs roughly
    /// `k^2` times the target precision in the argument.
    pub fn inverse(&self, w: &SeparationWitness) -> CReal {
        if let Some(q) = self.as_rational() {
            assert!(!q.is_zero(), "separation witness does not hold");
            return CReal::from_rational(q.recip());
        }
        CReal::node(Kind::Inv(self.clone(), w.bits()))
    }

    pub fn div(&self, o: &CReal, w: &SeparationWitness) -> CReal {
        self.mul(&o.inverse(w))
    }

    /// Search `k = 2^j`, `j <= max_bits`, with a certified `|x| >= 1/k`.
    pub fn separation_witness(&self, max_bits: u32) -> Option<SeparationWitness> {
        if let Some(q) = self.as_rational() {
            if q.is_zero() {
                return None;
            }
            let k = crate::exact::ceil_pos(&q.abs().recip());
            return Some(SeparationWitness { k });
        }
        for j in 0..=max_bits {
            let a = self.approx_bits(j + 2);
            if a.abs() >= two_pow_neg(j) + two_pow_neg(j + 2) {
                return Some(SeparationWitness { k: pow2(j) });
            }
        }
        None
    }

    /// Witness search that reports failure as an error.
    pub fn require_witness(&self, max_bits: u32) -> Result<SeparationWitness> {
        self.separation_witness(max_bits).ok_or_else(|| {
            Error::PrecisionExhausted(format!("no separation from zero within 2^-{max_bits}"))
        })
    }

    /// Rational upper bound on `|x|`.
    pub fn upper_abs(&self) -> BigRational {
        match self.as_rational() {
            Some(q) => q.abs(),
            None => self.approx_bits(20).abs() + two_pow_neg(20),
        }
    }

    /// Rational lower bound on `x`.
    pub fn lower_bound(&self, bits: u32) -> BigRational {
        match self.as_rational() {
            Some(q) => q.clone(),
            None => self.approx_bits(bits) - two_pow_neg(bits),
        }
    }

    /// Rational upper bound on `x`.
    pub fn upper_bound(&self, bits: u32) -> BigRational {
        match self.as_rational() {
            Some(q) => q.clone(),
            None => self.approx_bits(bits) + two_pow_neg(bits),
        }
    }

    /// `floor(x * 10^d) / 10^d`, followed by the error marker `±1e-d`.
    pub fn render(&self, d: usize) -> String {
        format!("{} ±1e-{}", self.render_digits(d), d)
    }

    /// Digits of `floor(x * 10^d) / 10^d`, refining precision until the
    /// floor is determined.
    pub fn render_digits(&self, d: usize) -> String {
        let scale = BigInt::from(10u32).pow(d as u32);
        let scale_q = BigRational::from_integer(scale.clone());
        let mut k = BigUint::from(4u32) * scale.to_biguint().unwrap();
        for _ in 0..64 {
            let q = self.approx_big(&k);
            let r = BigRational::new(BigInt::one(), BigInt::from(k.clone()));
            let lo = floor(&((&q - &r) * &scale_q));
            let hi = floor(&((&q + &r) * &scale_q));
            if lo == hi {
                return decimal_from_scaled(&lo, d);
            }
            k <<= 8;
        }
        let q = self.approx_big(&k);
        decimal_from_scaled(&floor(&(q * scale_q)), d)
    }
}

fn mul_approx(x: &CReal, y: &CReal, b: u32) -> BigRational {
    if let Some(r) = x.as_rational() {
        let e = b + 2 + ceil_log2_rat(r);
        return round_to_bits(&(r * y.approx_bits(e)), b + 1);
    }
    if let Some(r) = y.as_rational() {
        let e = b + 2 + ceil_log2_rat(r);
        return round_to_bits(&(x.approx_bits(e) * r), b + 1);
    }
    let one = BigRational::one();
    let bx = x.approx_bits(0).abs() + &one;
    let by = y.approx_bits(0).abs() + &one;
    let ex = b + 2 + ceil_log2_rat(&by);
    let ey = b + 2 + ceil_log2_rat(&(bx + one));
    round_to_bits(&(x.approx_bits(ex) * y.approx_bits(ey)), b + 1)
}

/// Compare `x` and `y` at tolerance `1/k`.
///
/// `Less` and `Greater` are certain; `Within` guarantees `|x - y| <= 1/k`.
pub fn compare(x: &CReal, y: &CReal, k: u64) -> Comparison {
    compare_big(x, y, &BigUint::from(k.max(1)))
}

pub fn compare_big(x: &CReal, y: &CReal, k: &BigUint) -> Comparison {
    if let (Some(a), Some(b)) = (x.as_rational(), y.as_rational()) {
        let t = BigRational::new(BigInt::one(), BigInt::from(k.clone()));
        let d = a - b;
        return if d.abs() <= t {
            Comparison::Within
        } else if d.is_negative() {
            Comparison::Less
        } else {
            Comparison::Greater
        };
    }
    let k4 = k * 4u32;
    let d = x.approx_big(&k4) - y.approx_big(&k4);
    let t = BigRational::new(BigInt::one(), BigInt::from(k * 2u32));
    if d > t {
        Comparison::Greater
    } else if d < -t {
        Comparison::Less
    } else {
        Comparison::Within
    }
}

/// Compare with escalating precision until decided or `max_bits` is reached.
pub fn compare_certain(x: &CReal, y: &CReal, max_bits: u32) -> Option<Comparison> {
    for b in (4..=max_bits).step_by(4) {
        match compare_big(x, y, &pow2(b)) {
            Comparison::Within => continue,
            c => return Some(c),
        }
    }
    None
}

/// Rational `1/k` as a real.
pub fn recip_int(k: &BigUint) -> CReal {
    CReal::from_rational(from_biguint(k).recip())
}

impl fmt::Debug for CReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(q) => write!(f, "CReal({})", crate::exact::format_rational(q)),
            None => write!(f, "CReal(~{})", self.render_digits(12)),
        }
    }
}

impl From<BigRational> for CReal {
    fn from(q: BigRational) -> CReal {
        CReal::from_rational(q)
    }
}

impl From<i64> for CReal {
    fn from(n: i64) -> CReal {
        CReal::from_int(n)
    }
}

impl Add for &CReal {
    type Output = CReal;
    fn add(self, o: &CReal) -> CReal {
        CReal::add(self, o)
    }
}

impl Sub for &CReal {
    type Output = CReal;
    fn sub(self, o: &CReal) -> CReal {
        CReal::sub(self, o)
    }
}

impl Mul for &CReal {
    type Output = CReal;
    fn mul(self, o: &CReal) -> CReal {
        CReal::mul(self, o)
    }
}

impl Neg for &CReal {
    type Output = CReal;
    fn neg(self) -> CReal {
        CReal::neg(self)
    }
}

/// `sqrt(q)` for rational `q >= 0` by integer square roots.
pub fn sqrt_rational(q: &BigRational) -> Result<CReal> {
    if q.is_negative() {
        return Err(Error::Domain("square root of a negative number".into()));
    }
    let q = q.clone();
    Ok(CReal::from_fn(move |b| {
        // floor(sqrt(q * 4^b)) / 2^b is within 2^-b
        let scaled = &q * BigRational::from_integer(BigInt::from(pow2(2 * b)));
        let n = floor(&scaled).to_biguint().unwrap_or_default().sqrt();
        crate::exact::dyadic(BigInt::from(n), b)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn within(q: &BigRational, target: &BigRational, k: u64) -> bool {
        (q - target).abs() <= rat(1, k as i64)
    }

    #[test]
    fn rational_leaves_stay_exact() {
        let x = CReal::from_rational(rat(1, 2)).add(&CReal::from_rational(rat(1, 3)));
        assert_eq!(x.as_rational(), Some(&rat(5, 6)));
        let y = x.mul(&CReal::from_int(6));
        assert_eq!(y.approx(1), int(5));
    }

    #[test]
    fn sqrt_two_squared() {
        let s = sqrt_rational(&int(2)).unwrap();
        let sq = s.mul(&s);
        assert!(within(&sq.approx(1_000_000), &int(2), 1_000_000));
        assert_eq!(compare(&s, &CReal::from_rational(rat(3, 2)), 100), Comparison::Less);
    }

    #[test]
    fn inverse_of_sqrt_two() {
        let s = sqrt_rational(&int(2)).unwrap();
        let w = s.separation_witness(10).unwrap();
        let inv = s.inverse(&w);
        let prod = inv.mul(&s);
        assert!(within(&prod.approx(1 << 30), &int(1), 1 << 30));
    }

    #[test]
    fn zero_has_no_witness() {
        assert!(CReal::zero().separation_witness(20).is_none());
        let tiny = CReal::from_fn(|_| BigRational::zero());
        assert!(tiny.separation_witness(12).is_none());
    }

    #[test]
    fn render_truncates() {
        let x = CReal::from_rational(rat(27182818, 10_000_000));
        assert_eq!(x.render(4), "2.7182 ±1e-4");
        let third = CReal::from_rational(rat(1, 3));
        assert_eq!(third.render_digits(3), "0.333");
    }

    #[test]
    fn sum_node_matches_fold() {
        let s = sqrt_rational(&int(2)).unwrap();
        let xs: Vec<CReal> = (0..50).map(|i| s.scale(&rat(1, i + 1))).collect();
        let total = CReal::sum(xs.clone());
        let fold = xs.iter().fold(CReal::zero(), |a, x| &a + x);
        assert_eq!(compare(&total, &fold, 1 << 20), Comparison::Within);
    }
}
