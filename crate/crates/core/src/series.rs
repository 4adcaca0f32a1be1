//! Absolutely convergent series with tail certificates, and the exponential.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num::{BigInt, BigRational, BigUint, Integer, One, Signed, ToPrimitive, Zero};

use crate::creal::{compare_big, CReal, Comparison};
use crate::error::{Error, Result};
use crate::exact::{
    ceil, ceil_log2, ceil_pos, factorial, floor, from_biguint, int, pow2, round_to_bits,
    two_pow_neg,
};

type Recurrence = dyn Fn(usize, &[CReal]) -> CReal + Send + Sync;
type TailFn = dyn Fn(&BigUint) -> usize + Send + Sync;

/// Series `sum x_n` with a tail certificate: `sum_{n > tail(k)} |x_n| <= 1/k`.
#[derive(Clone)]
pub struct ConvSeries {
    gen: Arc<Recurrence>,
    memo: Arc<Mutex<Vec<CReal>>>,
    tail: Arc<TailFn>,
}

impl ConvSeries {
    /// Coefficients from a recurrence `x_n = gen(n, &[x_0, .., x_{n-1}])`.
    pub fn from_recurrence(
        gen: impl Fn(usize, &[CReal]) -> CReal + Send + Sync + 'static,
        tail: impl Fn(&BigUint) -> usize + Send + Sync + 'static,
    ) -> ConvSeries {
        ConvSeries { gen: Arc::new(gen), memo: Arc::new(Mutex::new(Vec::new())), tail: Arc::new(tail) }
    }

    pub fn new(
        coeff: impl Fn(usize) -> CReal + Send + Sync + 'static,
        tail: impl Fn(&BigUint) -> usize + Send + Sync + 'static,
    ) -> ConvSeries {
        ConvSeries::from_recurrence(move |n, _| coeff(n), tail)
    }

    /// Finitely many nonzero terms.
    pub fn finite(xs: Vec<CReal>) -> ConvSeries {
        let len = xs.len();
        ConvSeries::new(
            move |n| xs.get(n).cloned().unwrap_or_else(CReal::zero),
            move |_| len.saturating_sub(1),
        )
    }

    pub fn coeff(&self, n: usize) -> CReal {
        let mut memo = self.memo.lock().unwrap();
        while memo.len() <= n {
            let i = memo.len();
            let x = (self.gen)(i, &memo);
            memo.push(x);
        }
        memo[n].clone()
    }

    pub fn coeffs(&self, count: usize) -> Vec<CReal> {
        if count == 0 {
            return Vec::new();
        }
        self.coeff(count - 1);
        self.memo.lock().unwrap()[..count].to_vec()
    }

    /// Index after which the absolute tail is at most `1/k`.
    pub fn tail_index(&self, k: &BigUint) -> usize {
        (self.tail)(k)
    }

    pub fn tail_index_u64(&self, k: u64) -> usize {
        self.tail_index(&BigUint::from(k.max(1)))
    }

    /// Sum of the first `n + 1` terms.
    pub fn partial_sum(&self, n: usize) -> CReal {
        CReal::sum(self.coeffs(n + 1))
    }

    /// Rational upper bound on `sum |x_n|`.
    pub fn abs_sum_bound(&self) -> BigRational {
        let n = self.tail_index(&BigUint::one());
        self.coeffs(n + 1).iter().fold(int(1), |acc, x| acc + x.upper_abs())
    }
}

/// Value of the series.
pub fn sum(s: &ConvSeries) -> CReal {
    let s = s.clone();
    CReal::from_fn(move |b| {
        let n = s.tail_index(&pow2(b + 2));
        let e = b + 2 + ceil_log2(&BigUint::from(n + 1));
        let mut acc = BigRational::zero();
        for x in s.coeffs(n + 1) {
            acc += round_to_bits(&x.approx_bits(e), e);
        }
        round_to_bits(&acc, b + 1)
    })
}

/// Upper bound `u` of `|x|`, certified `< 1`.
fn below_one(x: &CReal) -> Result<BigRational> {
    if let Some(q) = x.as_rational() {
        return if q.abs() < BigRational::one() {
            Ok(q.abs())
        } else {
            Err(Error::Domain("geometric series needs |x| < 1".into()))
        };
    }
    for j in 4..=64 {
        let u = x.approx_bits(j).abs() + two_pow_neg(j);
        if u < BigRational::one() {
            return Ok(u);
        }
    }
    Err(Error::Domain("geometric series needs |x| < 1".into()))
}

fn round_up(q: &BigRational, bits: u32) -> BigRational {
    let s = BigRational::from_integer(BigInt::from(pow2(bits)));
    BigRational::new(ceil(&(q * &s)), BigInt::from(pow2(bits)))
}

/// Smallest `N` with `u^(m+N+1) / (1-u) <= 1/k`, computed with upward rounding.
fn geometric_tail(u: &BigRational, m: u32, k: &BigUint) -> usize {
    if u.is_zero() {
        return 0;
    }
    let target = (BigRational::one() - u) / from_biguint(k);
    let mut t = BigRational::one();
    for _ in 0..=m {
        t = round_up(&(&t * u), 96);
    }
    let mut n = 0usize;
    while t > target {
        t = round_up(&(&t * u), 96);
        n += 1;
    }
    n
}

/// `sum_{n>=0} x^(m+n)`, defined for `|x| < 1`.
pub fn geometric(x: &CReal, m: u32) -> Result<ConvSeries> {
    let u = below_one(x)?;
    let x = x.clone();
    let first = x.pow(m);
    Ok(ConvSeries::from_recurrence(
        move |n, prev| if n == 0 { first.clone() } else { prev[n - 1].mul(&x) },
        move |k| geometric_tail(&u, m, k),
    ))
}

/// Tail data for `sum a^n/n!`: with `m = ceil(2|a|)` and `C = (2|a|)^m/m!`,
/// every term with `n >= m` is at most `C 2^-n`.
fn exp_tail_data(a_bound: &BigRational) -> (usize, BigRational) {
    let two_a = a_bound * int(2);
    let m = ceil(&two_a).to_usize().expect("exponent argument too large");
    let c = num::pow(two_a, m) / from_biguint(&factorial(m as u64));
    (m, c)
}

fn exp_tail(m: usize, c: &BigRational, k: &BigUint) -> usize {
    let ck = ceil_pos(&(c * from_biguint(k)));
    m.max(ceil_log2(&ck) as usize)
}

/// `sum_n a^n / n!`.
pub fn exp_series(a: &CReal) -> ConvSeries {
    let (m, c) = exp_tail_data(&a.upper_abs());
    let a = a.clone();
    ConvSeries::from_recurrence(
        move |n, prev| {
            if n == 0 {
                CReal::one()
            } else {
                prev[n - 1].mul(&a).scale(&BigRational::new(BigInt::one(), BigInt::from(n)))
            }
        },
        move |k| exp_tail(m, &c, k),
    )
}

/// Fixed-point evaluation of `e^r` for rational `|r| <= 1`, with the same
/// tail certificate as [`exp_series`].
fn exp_small(r: BigRational) -> CReal {
    assert!(r.abs() <= BigRational::one());
    let (m, c) = exp_tail_data(&r.abs());
    CReal::from_fn(move |b| {
        let n = exp_tail(m, &c, &pow2(b + 2));
        let s = b + 3 + ceil_log2(&BigUint::from(2 * (n + 1)));
        let p = r.numer().clone();
        let q = r.denom().clone();
        let mut t = BigInt::from(pow2(s));
        let mut acc = t.clone();
        for j in 1..=n {
            t = (t * &p).div_floor(&(&q * BigInt::from(j)));
            if t.is_zero() {
                break;
            }
            acc += &t;
        }
        round_to_bits(&BigRational::new(acc, BigInt::from(pow2(s))), b + 1)
    })
}

fn epow_cache() -> &'static Mutex<HashMap<i64, CReal>> {
    static CACHE: OnceLock<Mutex<HashMap<i64, CReal>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `e^n` for an integer `n`, shared across the process.
pub fn e_pow(n: i64) -> CReal {
    if n == 0 {
        return CReal::one();
    }
    if let Some(x) = epow_cache().lock().unwrap().get(&n) {
        return x.clone();
    }
    let x = if n == 1 || n == -1 {
        exp_small(int(n))
    } else {
        let half = e_pow(n / 2);
        let sq = half.mul(&half);
        if n % 2 == 0 {
            sq
        } else {
            sq.mul(&e_pow(n.signum()))
        }
    };
    epow_cache().lock().unwrap().entry(n).or_insert(x).clone()
}

/// Euler's number.
pub fn e() -> CReal {
    e_pow(1)
}

/// `e^t` for rational `t`, by splitting off the nearest integer.
pub fn exp_rational(t: &BigRational) -> CReal {
    let n = floor(&(t + BigRational::new(BigInt::one(), BigInt::from(2))));
    let r = t - BigRational::from_integer(n.clone());
    let n = n.to_i64().expect("exponent argument too large");
    if r.is_zero() {
        e_pow(n)
    } else if n == 0 {
        exp_small(r)
    } else {
        e_pow(n).mul(&exp_small(r))
    }
}

/// `e^x`.
pub fn exp(x: &CReal) -> CReal {
    match x.as_rational() {
        Some(t) => exp_rational(t),
        None => sum(&exp_series(x)),
    }
}

/// Cauchy product `z_n = sum_{i+j=n} x_i y_j`, with the tail split into the
/// part where the first index is large and the part where the second is.
pub fn cauchy_product(s: &ConvSeries, t: &ConvSeries) -> ConvSeries {
    let xs = s.abs_sum_bound();
    let ys = t.abs_sum_bound();
    let (s1, t1) = (s.clone(), t.clone());
    let (s2, t2) = (s.clone(), t.clone());
    ConvSeries::new(
        move |n| CReal::sum((0..=n).map(|i| s1.coeff(i).mul(&t1.coeff(n - i))).collect()),
        move |k| {
            let kq = from_biguint(k) * int(2);
            let a = s2.tail_index(&ceil_pos(&(&kq * &ys)));
            let b = t2.tail_index(&ceil_pos(&(&kq * &xs)));
            2 * a.max(b) + 1
        },
    )
}

/// Smallest `N` such that `y z^n / n! <= 1/k` for every `n >= N`.
pub fn exp_tail_index(y: &CReal, z: &CReal, k: u64) -> usize {
    let yb = y.upper_abs();
    let zb = z.upper_abs();
    let target = BigRational::new(BigInt::one(), BigInt::from(k.max(1)));
    let mut t = yb;
    let mut candidate: Option<usize> = None;
    let mut n = 0usize;
    loop {
        if t <= target {
            candidate.get_or_insert(n);
        } else {
            candidate = None;
        }
        if int(n as i64) >= zb {
            if let Some(c) = candidate {
                return c;
            }
        }
        n += 1;
        t = t * &zb / int(n as i64);
    }
}

fn nth_root_ceil(k: &BigUint, m: u32) -> BigUint {
    let r = k.nth_root(m);
    if num::pow(r.clone(), m as usize) == *k {
        r
    } else {
        r + 1u32
    }
}

/// `X` with `x^m e^{-x} <= 1/k` for all `x >= X`.
///
/// The a priori bound comes from `e^{x/m} >= x^2/(2m^2)`; the returned value is
/// the least integer `X >= m` at which the inequality is certified by
/// evaluation, where `x^m e^{-x}` is already decreasing.
pub fn exp_dominance_bound(m: u32, k: &BigUint) -> BigUint {
    let a_priori = if m == 0 {
        k.clone()
    } else {
        BigUint::from(2 * m * m) * nth_root_ceil(k, m)
    };
    let target = CReal::from_rational(from_biguint(k).recip());
    let precision = k * 8u32;
    let mut x = BigUint::from(m);
    while x < a_priori {
        let xq = from_biguint(&x);
        let v = CReal::from_rational(num::pow(xq.clone(), m as usize)).mul(&exp_rational(&-xq));
        if compare_big(&v, &target, &precision) == Comparison::Less {
            return x;
        }
        x += 1u32;
    }
    a_priori
}
