//! Riemann integration of uniformly continuous functions.
//!
//! Integrals are computed on uniform partitions with midpoint tags. For a
//! plain UC function the norm comes from its modulus of continuity. For a
//! differentiable one the difference-quotient modulus gives a second order
//! error bound per cell, `h^2 / (4K)` whenever `h/2 <= 1/ud(K)`, and the
//! cheaper of the two partitions is used.

use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::creal::{compare_big, CReal, Comparison};
use crate::error::{Error, Result};
use crate::exact::{ceil_log2, ceil_log2_rat, ceil_pos, from_biguint, int, max_rat, min_rat, pow2, rat, round_to_bits, two_pow_neg};
use crate::report::{Check, Report};
use crate::series::{e_pow, exp_dominance_bound};
use crate::ucfun::{abs_fun, bound, eval_at_real, exp_scaled, lin_comb, poly, product, restrict, shift_arg, Domain, Interval, UCFun, UDiffFun};

/// Largest partition `integrate` will evaluate.
pub const MAX_CELLS: u64 = 50_000_000;

/// Points `u_0 < ... < u_n` with tags `b_i` in `[u_{i-1}, u_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedPartition {
    points: Vec<BigRational>,
    tags: Vec<BigRational>,
}

impl TaggedPartition {
    pub fn new(points: Vec<BigRational>, tags: Vec<BigRational>) -> Result<TaggedPartition> {
        if points.len() < 2 || tags.len() + 1 != points.len() {
            return Err(Error::Precondition("partition needs n+1 points and n tags".into()));
        }
        for i in 1..points.len() {
            if points[i - 1] >= points[i] {
                return Err(Error::Precondition("partition points must increase strictly".into()));
            }
            if tags[i - 1] < points[i - 1] || tags[i - 1] > points[i] {
                return Err(Error::Precondition(format!("tag {i} lies outside its cell")));
            }
        }
        Ok(TaggedPartition { points, tags })
    }

    fn uniform(u: &BigRational, v: &BigRational, n: usize, tag_at: BigRational) -> Result<TaggedPartition> {
        if n == 0 || u >= v {
            return Err(Error::Precondition("uniform partition needs u < v and n >= 1".into()));
        }
        let h = (v - u) / int(n as i64);
        let points: Vec<BigRational> = (0..=n).map(|i| u + &h * int(i as i64)).collect();
        let tags = (0..n).map(|i| &points[i] + &h * &tag_at).collect();
        Ok(TaggedPartition { points, tags })
    }

    pub fn uniform_midpoint(u: &BigRational, v: &BigRational, n: usize) -> Result<TaggedPartition> {
        TaggedPartition::uniform(u, v, n, BigRational::new(1.into(), 2.into()))
    }

    pub fn uniform_left(u: &BigRational, v: &BigRational, n: usize) -> Result<TaggedPartition> {
        TaggedPartition::uniform(u, v, n, BigRational::zero())
    }

    pub fn points(&self) -> &[BigRational] {
        &self.points
    }

    pub fn tags(&self) -> &[BigRational] {
        &self.tags
    }

    pub fn cells(&self) -> usize {
        self.tags.len()
    }

    /// Largest cell width.
    pub fn norm(&self) -> BigRational {
        self.points.windows(2).map(|w| &w[1] - &w[0]).max().expect("at least one cell")
    }
}

/// `sum f(b_i) (u_i - u_{i-1})`.
pub fn riemann_sum(f: &UCFun, p: &TaggedPartition) -> Result<CReal> {
    let first = p.points.first().unwrap();
    let last = p.points.last().unwrap();
    if !f.domain().contains(first) || !f.domain().contains(last) {
        return Err(Error::Domain("partition leaves the domain".into()));
    }
    let weights: Vec<BigRational> = p.points.windows(2).map(|w| &w[1] - &w[0]).collect();
    let total = last - first;
    let extra = 2 + ceil_log2_rat(&total);
    let f = f.clone();
    let tags = p.tags.clone();
    Ok(CReal::from_fn(move |b| {
        let bits = b + extra;
        let vals: Vec<BigRational> = tags.par_iter().map(|t| f.eval_unchecked(t).approx_bits(bits)).collect();
        let mut acc = BigRational::zero();
        for (v, w) in vals.iter().zip(&weights) {
            acc += v * w;
        }
        round_to_bits(&acc, b + 1)
    }))
}

/// `h sum f(a + (i + 1/2) h)` for `i < n`, without storing the partition.
fn midpoint_sum(f: &UCFun, a: BigRational, h: BigRational, n: u64) -> CReal {
    let f = f.clone();
    let extra = 2 + ceil_log2_rat(&(&h * int(n as i64)));
    let half = &h / int(2);
    CReal::from_fn(move |b| {
        let bits = b + extra;
        let vals: Vec<BigRational> = (0..n)
            .into_par_iter()
            .map(|i| {
                let t = &a + &half + &h * BigRational::from_integer(BigInt::from(i));
                f.eval_unchecked(&t).approx_bits(bits)
            })
            .collect();
        let mut acc = BigRational::zero();
        for v in &vals {
            acc += v;
        }
        round_to_bits(&(acc * &h), b + 1)
    })
}

/// Value of an integral together with how it was obtained.
#[derive(Clone, Debug)]
pub struct IntegralResult {
    /// Within `1/requested_k` of the integral.
    pub value: CReal,
    pub requested_k: u64,
    pub partition_norm_used: BigRational,
    pub cells: u64,
}

/// Cells needed for error `1/k` on a rational interval of width `w`.
pub fn cells_needed(f: &UCFun, w: &BigRational, k: &BigUint) -> BigUint {
    let kq = from_biguint(k);
    // midpoint tags sit within h/2 of every point of their cell
    let l = f.uc_modulus_big(&ceil_pos(&(w * &kq)));
    let mut best = ceil_pos(&(w * from_biguint(&l) / int(2)));
    if f.is_differentiable() {
        let w2k = w * w * &kq;
        for j in 0..256u32 {
            let kk = pow2(j);
            let n1 = ceil_pos(&(w * from_biguint(&f.ud_modulus_big(&kk).unwrap()) / int(2)));
            if n1 >= best {
                break;
            }
            let n2 = ceil_pos(&(&w2k / (from_biguint(&kk) * int(4))));
            best = best.min(n1.max(n2));
        }
        // chaining 2^j steps of length 1/ud(1) gives the modulus at K = 2^-j
        let u1 = from_biguint(&f.ud_modulus_big(&BigUint::one()).unwrap());
        for j in 1..256u32 {
            let n2 = ceil_pos(&(&w2k * from_biguint(&pow2(j)) / int(4)));
            if n2 >= best {
                break;
            }
            let n1 = ceil_pos(&(w * &u1 / (from_biguint(&pow2(j)) * int(2))));
            best = best.min(n1.max(n2));
        }
    }
    best
}

/// Sup of `|f|` near the hull of `lo`, `hi`.
fn local_sup(f: &UCFun, lo: &BigRational, hi: &BigRational) -> Result<BigRational> {
    if let Some(s) = f.sup() {
        return Ok(s.clone());
    }
    match f.domain() {
        Domain::Interval(_) => bound(f, 4),
        Domain::Line => bound(&restrict(f, Interval::rational(lo - int(1), hi + int(1))?), 4),
    }
}

/// `int_u^v f` within `1/k`. For `v < u` this is `-int_v^u f`.
pub fn integrate(f: &UCFun, u: &CReal, v: &CReal, k: u64) -> Result<IntegralResult> {
    integrate_big(f, u, v, &BigUint::from(k.max(1)))
}

pub fn integrate_big(f: &UCFun, u: &CReal, v: &CReal, k: &BigUint) -> Result<IntegralResult> {
    let k = if k.is_zero() { BigUint::one() } else { k.clone() };
    let requested_k = k.to_u64().unwrap_or(u64::MAX);
    let zero = || IntegralResult {
        value: CReal::zero(),
        requested_k,
        partition_norm_used: BigRational::zero(),
        cells: 0,
    };
    let hull_lo = min_rat(&u.lower_bound(16), &v.lower_bound(16));
    let hull_hi = max_rat(&u.upper_bound(16), &v.upper_bound(16));
    let sup = local_sup(f, &hull_lo, &hull_hi)?;
    let kk = ceil_pos(&(from_biguint(&k) * (&sup + int(1))));
    let (lo, hi, negate) = match compare_big(u, v, &kk) {
        Comparison::Within => return Ok(zero()),
        Comparison::Less => (u, v, false),
        Comparison::Greater => (v, u, true),
    };

    let exact = lo.as_rational().is_some() && hi.as_rational().is_some();
    let (a, b) = if exact {
        (lo.as_rational().unwrap().clone(), hi.as_rational().unwrap().clone())
    } else {
        let iv = Interval::new(lo.clone(), hi.clone())?;
        iv.inner(ceil_log2(&ceil_pos(&(from_biguint(&k) * int(8) * (&sup + int(1))))))
    };
    if !f.domain().contains(&a) || !f.domain().contains(&b) {
        return Err(Error::Domain("integration interval leaves the domain".into()));
    }
    if a >= b {
        return Ok(zero());
    }
    let kd = if exact { k.clone() } else { &k * 2u32 };
    let w = &b - &a;
    let n = cells_needed(f, &w, &kd);
    let n = n.to_u64().filter(|&n| n <= MAX_CELLS).ok_or_else(|| {
        Error::Resource(format!("integration needs {n} cells, above the cap of {MAX_CELLS}"))
    })?;
    let h = &w / int(n as i64);
    let s = midpoint_sum(f, a, h.clone(), n);
    Ok(IntegralResult {
        value: if negate { s.neg() } else { s },
        requested_k,
        partition_norm_used: h,
        cells: n,
    })
}

/// Cutoff `A` with `|int_A^inf p(a) e^{-a} da| <= 1/(2k)`, from
/// `|p(a)| <= C e^{a/2}` on `a >= 0` where `C = sum |x_i| (2i)^i`, since
/// `a^i e^{-a/2} <= (2i/e)^i`.
pub fn improper_cutoff(p: &[CReal], k: &BigUint) -> BigUint {
    let c: BigRational = p
        .iter()
        .enumerate()
        .map(|(i, x)| x.upper_abs() * from_biguint(&num::pow(BigUint::from(2 * i), i)))
        .sum();
    if c.is_zero() {
        return BigUint::zero();
    }
    let kk = ceil_pos(&(c * int(4) * from_biguint(k)));
    exp_dominance_bound(0, &kk) * 2u32
}

/// `int_0^inf p(a) e^{-a} da` within `1/k`, for `p = sum x_i a^i`.
pub fn integrate_improper_polyexp(p: &[CReal], k: u64) -> Result<CReal> {
    let k = BigUint::from(k.max(1));
    let cutoff = improper_cutoff(p, &k);
    let pieces = cutoff.to_i64().ok_or_else(|| Error::Resource("improper cutoff too large".into()))?;
    if pieces == 0 {
        return Ok(CReal::zero());
    }
    let piece_k = from_biguint(&(&k * 2u32 * BigUint::from(pieces as u64)));
    let mut parts = Vec::with_capacity(pieces as usize);
    let unit = exp_scaled(int(-1), Interval::ints(0, 1).into())?;
    for j in 0..pieces {
        // p(a) e^{-a} = (2/e)^j (2^-j p(a)) e^{-(a-j)}; with 2/e <= 3/4 the
        // inner integral needs only piece_k (3/4)^j
        let dom: Domain = Interval::ints(j, j + 1).into();
        let scale = two_pow_neg(j as u32);
        let pf = poly(p.iter().map(|c| c.scale(&scale)).collect(), dom)?;
        let e = shift_arg(unit.as_uc(), &int(-j))?;
        let f = product(pf.as_uc(), &e)?;
        let kj = ceil_pos(&(&piece_k * num::pow(rat(3, 4), j as usize)));
        let inner = integrate_big(&f, &CReal::from_int(j), &CReal::from_int(j + 1), &kj)?.value;
        parts.push(inner.mul(&e_pow(-j)).scale(&from_biguint(&pow2(j as u32))));
    }
    Ok(CReal::sum(parts))
}

/// Outcome of an FTA check.
#[derive(Clone, Debug)]
pub struct FtaCheck {
    pub integral: CReal,
    pub difference: CReal,
    pub check: Check,
}

/// `int_u^v g' = g(v) - g(u)`, with the integral taken within `1/(2k)`.
pub fn check_fta(g: &UDiffFun, u: &CReal, v: &CReal, k: u64) -> Result<FtaCheck> {
    let k = k.max(1);
    let integral = integrate(&g.deriv(), u, v, 2 * k)?.value;
    let difference = eval_at_real(g.as_uc(), v)?.sub(&eval_at_real(g.as_uc(), u)?);
    let check = Check::identity("fta", &integral, &difference, BigRational::new(1.into(), k.into()));
    Ok(FtaCheck { integral, difference, check })
}

/// Linearity, additivity, reversal, shift, monotonicity against `|f|`, the
/// absolute value inequality and the sup-norm bound, each within `3/k`.
#[allow(clippy::too_many_arguments)]
pub fn verify_integral_algebra(
    f: &UCFun,
    g: &UCFun,
    u: &CReal,
    v: &CReal,
    w: &CReal,
    x: &CReal,
    y: &CReal,
    shift: &BigRational,
    k: u64,
) -> Result<Report> {
    let k = k.max(1);
    let tol = BigRational::new(3.into(), k.into());
    let k4 = 4 * k;
    let mut report = Report::default();

    let scale = x.upper_abs() + y.upper_abs() + int(1);
    let kl = ceil_pos(&(scale * int(2 * k as i64)));
    let comb = lin_comb(x, f, y, g)?;
    let lhs = integrate_big(&comb, u, v, &kl)?.value;
    let rhs = x.mul(&integrate_big(f, u, v, &kl)?.value).add(&y.mul(&integrate_big(g, u, v, &kl)?.value));
    report.push(Check::identity("linearity", &lhs, &rhs, tol.clone()));

    let fuv = integrate(f, u, v, k4)?.value;
    let fvw = integrate(f, v, w, k4)?.value;
    let fuw = integrate(f, u, w, k4)?.value;
    report.push(Check::identity("additivity", &fuw, &fuv.add(&fvw), tol.clone()));

    let fvu = integrate(f, v, u, k4)?.value;
    report.push(Check::identity("reversal", &fvu, &fuv.neg(), tol.clone()));

    let s = CReal::from_rational(shift.clone());
    let moved = integrate(f, &u.add(&s), &v.add(&s), k4)?.value;
    let shifted = integrate(&shift_arg(f, shift)?, u, v, k4)?.value;
    report.push(Check::identity("shift", &moved, &shifted, tol.clone()));

    let abs_int = integrate(&abs_fun(f), u, v, k)?.value;
    report.push(Check::at_most("monotone", &fuv, &abs_int, tol.clone()));
    report.push(Check::at_most("abs", &fuv.abs(), &abs_int, tol.clone()));

    let iv = Interval::new(min_real(u, v), max_real(u, v))?;
    let sup = bound(&restrict(f, iv), 16)?;
    let width = u.sub(v).abs();
    report.push(Check::at_most("lm_bound", &fuv.abs(), &width.scale(&sup), tol));
    Ok(report)
}

fn min_real(a: &CReal, b: &CReal) -> CReal {
    if compare_big(a, b, &BigUint::from(1u32 << 20)) == Comparison::Greater {
        b.clone()
    } else {
        a.clone()
    }
}

fn max_real(a: &CReal, b: &CReal) -> CReal {
    if compare_big(a, b, &BigUint::from(1u32 << 20)) == Comparison::Greater {
        a.clone()
    } else {
        b.clone()
    }
}
