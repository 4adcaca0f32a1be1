//! Uniformly continuous and uniformly differentiable functions.
//!
//! A function is evaluated on rationals and carries a modulus `k -> l`:
//! `|a - b| <= 1/l` implies `|f(a) - f(b)| <= 1/k`. Differentiable functions
//! also carry a derivative and a modulus for the difference quotient:
//! `|(f(b) - f(a))/(b - a) - f'(a)| <= 1/k` whenever `0 < |a - b| <= 1/l`.
//!
//! Bounds used to build moduli come from the structure of the function
//! (monomials and exponentials bounded at the interval ends), so they are
//! cheap and explicit rather than found by search.

use std::sync::{Arc, OnceLock};

use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};
use num::integer::Integer;

use crate::creal::{compare, compare_certain, CReal, Comparison, SeparationWitness};
use crate::error::{Error, Result};
use crate::exact::{ceil, ceil_log2, ceil_pos, from_biguint, int, max_rat, min_rat, rat, two_pow_neg, RatInterval};
use crate::series::exp_rational;

pub type Modulus = Arc<dyn Fn(&BigUint) -> BigUint + Send + Sync>;
pub type EvalFn = Arc<dyn Fn(&BigRational) -> CReal + Send + Sync>;

/// Largest number of grid points a search will evaluate.
pub const GRID_CAP: usize = 4_000_000;

/// Closed interval with real endpoints `lo < hi`.
#[derive(Clone)]
pub struct Interval {
    lo: CReal,
    hi: CReal,
    outer: RatInterval,
    min_bits: u32,
}

impl Interval {
    pub fn new(lo: CReal, hi: CReal) -> Result<Interval> {
        for b in [8u32, 16, 32, 64, 128] {
            let gap = hi.lower_bound(b) - lo.upper_bound(b);
            if gap.is_positive() {
                let outer = RatInterval::new(lo.lower_bound(32), hi.upper_bound(32))?;
                // inner points are within 2^(1-b) of the ends; keep them ordered
                let min_bits = 3 + crate::exact::ceil_log2_rat(&gap.recip());
                return Ok(Interval { lo, hi, outer, min_bits });
            }
        }
        Err(Error::Precondition("interval endpoints not certified lo < hi".into()))
    }

    pub fn rational(lo: BigRational, hi: BigRational) -> Result<Interval> {
        Interval::new(CReal::from_rational(lo), CReal::from_rational(hi))
    }

    pub fn ints(lo: i64, hi: i64) -> Interval {
        Interval::rational(int(lo), int(hi)).expect("lo < hi")
    }

    pub fn lo(&self) -> &CReal {
        &self.lo
    }

    pub fn hi(&self) -> &CReal {
        &self.hi
    }

    /// Rational interval containing this one.
    pub fn outer(&self) -> &RatInterval {
        &self.outer
    }

    /// Upper bound of `|a|` on the interval.
    pub fn mag(&self) -> BigRational {
        self.outer.mag()
    }

    /// Rational points inside the interval, each within `2^(1-bits)` of its end.
    pub fn inner(&self, bits: u32) -> (BigRational, BigRational) {
        let b = bits.max(self.min_bits);
        let lo = match self.lo.as_rational() {
            Some(q) => q.clone(),
            None => self.lo.approx_bits(b) + two_pow_neg(b),
        };
        let hi = match self.hi.as_rational() {
            Some(q) => q.clone(),
            None => self.hi.approx_bits(b) - two_pow_neg(b),
        };
        (lo, hi)
    }

    pub fn contains(&self, a: &BigRational) -> bool {
        if !self.outer.contains(a) {
            return false;
        }
        let x = CReal::from_rational(a.clone());
        compare_certain(&x, &self.lo, 64) != Some(Comparison::Less)
            && compare_certain(&x, &self.hi, 64) != Some(Comparison::Greater)
    }

    /// Nearest point of the inner rational interval.
    pub fn clamp(&self, a: BigRational, bits: u32) -> BigRational {
        let (lo, hi) = self.inner(bits);
        if a < lo {
            lo
        } else if a > hi {
            hi
        } else {
            a
        }
    }

    pub fn same_hull(&self, o: &Interval) -> bool {
        self.outer == o.outer
    }
}

#[derive(Clone)]
pub enum Domain {
    Line,
    Interval(Interval),
}

impl Domain {
    pub fn interval(&self) -> Option<&Interval> {
        match self {
            Domain::Line => None,
            Domain::Interval(i) => Some(i),
        }
    }

    fn require_interval(&self, what: &str) -> Result<&Interval> {
        self.interval().ok_or_else(|| Error::Domain(format!("{what} needs a bounded domain")))
    }

    pub fn contains(&self, a: &BigRational) -> bool {
        match self {
            Domain::Line => true,
            Domain::Interval(i) => i.contains(a),
        }
    }

    fn clamp(&self, a: BigRational, bits: u32) -> BigRational {
        match self {
            Domain::Line => a,
            Domain::Interval(i) => i.clamp(a, bits),
        }
    }

    fn compatible(&self, o: &Domain) -> bool {
        match (self, o) {
            (Domain::Line, Domain::Line) => true,
            (Domain::Interval(a), Domain::Interval(b)) => a.same_hull(b),
            _ => false,
        }
    }
}

impl From<Interval> for Domain {
    fn from(i: Interval) -> Domain {
        Domain::Interval(i)
    }
}

struct Diff {
    ud: Modulus,
    deriv: OnceLock<UCFun>,
    make: Box<dyn Fn() -> UCFun + Send + Sync>,
}

struct Inner {
    domain: Domain,
    eval: EvalFn,
    modulus: Modulus,
    sup: Option<BigRational>,
    diff: Option<Diff>,
}

/// Uniformly continuous function with an explicit modulus.
#[derive(Clone)]
pub struct UCFun(Arc<Inner>);

/// Uniformly differentiable function; its derivative is again a [`UCFun`].
#[derive(Clone)]
pub struct UDiffFun(UCFun);

/// `max(1, ceil(r * k))`.
fn ceil_mul(r: &BigRational, k: &BigUint) -> BigUint {
    ceil_pos(&(r * from_biguint(k)))
}

fn ceil_big(r: &BigRational) -> BigUint {
    ceil_pos(r)
}

impl UCFun {
    /// Function from parts. `sup`, when given, bounds `|f|` on the domain.
    pub fn new(
        domain: Domain,
        eval: impl Fn(&BigRational) -> CReal + Send + Sync + 'static,
        modulus: impl Fn(&BigUint) -> BigUint + Send + Sync + 'static,
        sup: Option<BigRational>,
    ) -> UCFun {
        UCFun(Arc::new(Inner {
            domain,
            eval: Arc::new(eval),
            modulus: Arc::new(modulus),
            sup,
            diff: None,
        }))
    }

    fn from_parts(
        domain: Domain,
        eval: EvalFn,
        modulus: Modulus,
        sup: Option<BigRational>,
        diff: Option<Diff>,
    ) -> UCFun {
        UCFun(Arc::new(Inner { domain, eval, modulus, sup, diff }))
    }

    pub fn domain(&self) -> &Domain {
        &self.0.domain
    }

    /// Value at a rational point of the domain.
    pub fn eval(&self, a: &BigRational) -> Result<CReal> {
        if !self.0.domain.contains(a) {
            return Err(Error::Domain(format!("{} lies outside the domain", crate::exact::format_rational(a))));
        }
        Ok((self.0.eval)(a))
    }

    /// Value at a rational point assumed to be in the domain.
    pub fn eval_unchecked(&self, a: &BigRational) -> CReal {
        (self.0.eval)(a)
    }

    pub fn uc_modulus(&self, k: u64) -> BigUint {
        (self.0.modulus)(&BigUint::from(k.max(1)))
    }

    pub fn uc_modulus_big(&self, k: &BigUint) -> BigUint {
        (self.0.modulus)(k)
    }

    /// Structural bound on `|f|` over the domain, when the domain is bounded.
    pub fn sup(&self) -> Option<&BigRational> {
        self.0.sup.as_ref()
    }

    fn require_sup(&self, what: &str) -> Result<BigRational> {
        self.0.sup.clone().ok_or_else(|| Error::Domain(format!("{what} needs a bounded factor")))
    }

    pub fn is_differentiable(&self) -> bool {
        self.0.diff.is_some()
    }

    pub fn as_udiff(&self) -> Option<UDiffFun> {
        self.0.diff.as_ref().map(|_| UDiffFun(self.clone()))
    }

    pub fn ud_modulus_big(&self, k: &BigUint) -> Option<BigUint> {
        self.0.diff.as_ref().map(|d| (d.ud)(k))
    }

    pub fn derivative(&self) -> Option<UCFun> {
        self.0.diff.as_ref().map(|d| d.deriv.get_or_init(|| (d.make)()).clone())
    }
}

impl UDiffFun {
    /// Differentiable function from parts.
    pub fn new(
        domain: Domain,
        eval: impl Fn(&BigRational) -> CReal + Send + Sync + 'static,
        modulus: impl Fn(&BigUint) -> BigUint + Send + Sync + 'static,
        sup: Option<BigRational>,
        deriv: UCFun,
        ud: impl Fn(&BigUint) -> BigUint + Send + Sync + 'static,
    ) -> UDiffFun {
        let cell = OnceLock::new();
        let _ = cell.set(deriv);
        let diff = Diff { ud: Arc::new(ud), deriv: cell, make: Box::new(|| unreachable!()) };
        UDiffFun(UCFun::from_parts(domain, Arc::new(eval), Arc::new(modulus), sup, Some(diff)))
    }

    pub fn as_uc(&self) -> &UCFun {
        &self.0
    }

    pub fn into_uc(self) -> UCFun {
        self.0
    }

    pub fn domain(&self) -> &Domain {
        self.0.domain()
    }

    pub fn eval(&self, a: &BigRational) -> Result<CReal> {
        self.0.eval(a)
    }

    pub fn uc_modulus(&self, k: u64) -> BigUint {
        self.0.uc_modulus(k)
    }

    pub fn ud_modulus(&self, k: u64) -> BigUint {
        self.ud_modulus_big(&BigUint::from(k.max(1)))
    }

    pub fn ud_modulus_big(&self, k: &BigUint) -> BigUint {
        self.0.ud_modulus_big(k).expect("differentiable")
    }

    pub fn deriv(&self) -> UCFun {
        self.0.derivative().expect("differentiable")
    }

    pub fn sup(&self) -> Option<&BigRational> {
        self.0.sup()
    }
}

fn all_rational(xs: &[CReal]) -> Option<Vec<BigRational>> {
    xs.iter().map(|x| x.as_rational().cloned()).collect()
}

/// Constant function.
pub fn constant(y: CReal, domain: Domain) -> UDiffFun {
    poly(vec![y], domain).expect("constants live on any domain")
}

/// `sum y_i a^i`. Degree two or more needs a bounded domain.
pub fn poly(coeffs: Vec<CReal>, domain: Domain) -> Result<UDiffFun> {
    let mut coeffs = coeffs;
    while coeffs.len() > 1 && coeffs.last().and_then(|c| c.as_rational()).is_some_and(|q| q.is_zero()) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        coeffs.push(CReal::zero());
    }
    let deg = coeffs.len() - 1;
    if deg >= 2 && domain.interval().is_none() {
        return Err(Error::Domain("polynomial of degree >= 2 on an unbounded domain".into()));
    }
    let m = domain.interval().map(|i| i.mag()).unwrap_or_else(BigRational::zero);
    let abs: Vec<BigRational> = coeffs.iter().map(|c| c.upper_abs()).collect();
    let mut lip = BigRational::zero();
    let mut lip2 = BigRational::zero();
    let mut sup = BigRational::zero();
    for (i, a) in abs.iter().enumerate() {
        sup += a * num::pow(m.clone(), i);
        if i >= 1 {
            lip += a * int(i as i64) * num::pow(m.clone(), i - 1);
        }
        if i >= 2 {
            lip2 += a * int((i * (i - 1)) as i64) * num::pow(m.clone(), i - 2);
        }
    }
    let sup = if domain.interval().is_some() || deg == 0 { Some(sup) } else { None };
    let half_lip2 = lip2 / int(2);

    let eval: EvalFn = match all_rational(&coeffs) {
        Some(qs) => {
            // integer Horner over the common denominator, normalized once
            let den = qs.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
            let nums: Vec<BigInt> = qs.iter().map(|q| q.numer() * (&den / q.denom())).collect();
            Arc::new(move |a: &BigRational| {
                let (n, d) = (a.numer(), a.denom());
                let mut acc = BigInt::zero();
                let mut dpow = BigInt::one();
                for c in nums.iter().rev() {
                    acc = acc * n + c * &dpow;
                    dpow *= d;
                }
                let dpow = dpow / d;
                CReal::from_rational(BigRational::new(acc, &den * dpow))
            })
        }
        None => {
            let cs = coeffs.clone();
            Arc::new(move |a: &BigRational| {
                let x = CReal::from_rational(a.clone());
                let mut acc = CReal::zero();
                for c in cs.iter().rev() {
                    acc = acc.mul(&x).add(c);
                }
                acc
            })
        }
    };
    let deriv_coeffs: Vec<CReal> = if deg == 0 {
        vec![CReal::zero()]
    } else {
        coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale(&int(i as i64))).collect()
    };
    let d_domain = domain.clone();
    let diff = Diff {
        ud: Arc::new(move |k| ceil_mul(&half_lip2, k)),
        deriv: OnceLock::new(),
        make: Box::new(move || poly(deriv_coeffs.clone(), d_domain.clone()).expect("derivative keeps the domain").into_uc()),
    };
    Ok(UDiffFun(UCFun::from_parts(domain, eval, Arc::new(move |k| ceil_mul(&lip, k)), sup, Some(diff))))
}

/// Polynomial with rational coefficients.
pub fn poly_rat(coeffs: &[BigRational], domain: Domain) -> Result<UDiffFun> {
    poly(coeffs.iter().cloned().map(CReal::from_rational).collect(), domain)
}

/// `y e^{c a}` on a bounded domain.
fn exp_term(y: BigRational, c: BigRational, domain: Domain) -> Result<UDiffFun> {
    if c.is_zero() {
        return Ok(constant(CReal::from_rational(y), domain));
    }
    let iv = domain.require_interval("an exponential")?;
    let t_max = max_rat(&(&c * &iv.outer().lo), &(&c * &iv.outer().hi));
    // relative precision: e^t >= 2^(-3|t|/2) for t <= 0
    let extra = if t_max.is_negative() { ceil(&(-&t_max * rat(3, 2))).to_u32().unwrap_or(u32::MAX / 2) } else { 0 };
    let e_bound = exp_rational(&t_max).upper_bound(24 + extra);
    let ya = y.abs();
    let ca = c.abs();
    let sup = &ya * &e_bound;
    let uc_coef = int(2) * &ca * &sup;
    let ud_coef = &ca * &ca * &sup;
    // |c (a - b)| <= 1/2 keeps the linear estimates of e^t - 1 valid
    let floor_l = ceil_big(&(int(2) * &ca));
    let floor_l2 = floor_l.clone();
    let (y2, c2, d2) = (y.clone(), c.clone(), domain.clone());
    let eval: EvalFn = Arc::new(move |a: &BigRational| {
        let e = exp_rational(&(&c * a));
        e.scale(&y)
    });
    let diff = Diff {
        ud: Arc::new(move |k| ceil_mul(&ud_coef, k).max(floor_l2.clone())),
        deriv: OnceLock::new(),
        make: Box::new(move || exp_term(&y2 * &c2, c2.clone(), d2.clone()).expect("same domain").into_uc()),
    };
    Ok(UDiffFun(UCFun::from_parts(
        domain,
        eval,
        Arc::new(move |k| ceil_mul(&uc_coef, k).max(floor_l.clone())),
        Some(sup),
        Some(diff),
    )))
}

/// `e^{c a}` on a bounded domain.
pub fn exp_scaled(c: BigRational, domain: Domain) -> Result<UDiffFun> {
    exp_term(BigRational::one(), c, domain)
}

/// `y a^n e^{c a}`, built as a product of a monomial and an exponential.
pub fn polyexp(y: CReal, n: usize, c: BigRational, domain: Domain) -> Result<UDiffFun> {
    let mut coeffs = vec![CReal::zero(); n + 1];
    coeffs[n] = y;
    let p = poly(coeffs, domain.clone())?;
    let e = exp_scaled(c, domain)?;
    product_diff(&p, &e)
}

/// `x f + y g`.
pub fn lin_comb(x: &CReal, f: &UCFun, y: &CReal, g: &UCFun) -> Result<UCFun> {
    if !f.domain().compatible(g.domain()) {
        return Err(Error::Precondition("linear combination of functions on different domains".into()));
    }
    let xa = x.upper_abs();
    let ya = y.upper_abs();
    let scale = &xa + &ya;
    let sup = match (f.sup(), g.sup()) {
        (Some(a), Some(b)) => Some(&xa * a + &ya * b),
        _ => None,
    };
    let (x1, f1, y1, g1) = (x.clone(), f.clone(), y.clone(), g.clone());
    let eval: EvalFn = Arc::new(move |a: &BigRational| {
        let u = x1.mul(&f1.eval_unchecked(a));
        let v = y1.mul(&g1.eval_unchecked(a));
        u.add(&v)
    });
    let (f2, g2, s2) = (f.clone(), g.clone(), scale.clone());
    let modulus: Modulus = Arc::new(move |k| {
        let kk = ceil_mul(&s2, k);
        f2.uc_modulus_big(&kk).max(g2.uc_modulus_big(&kk))
    });
    let diff = if f.is_differentiable() && g.is_differentiable() {
        let (f3, g3) = (f.clone(), g.clone());
        let (x4, f4, y4, g4) = (x.clone(), f.clone(), y.clone(), g.clone());
        Some(Diff {
            ud: Arc::new(move |k| {
                let kk = ceil_mul(&scale, k);
                f3.ud_modulus_big(&kk).unwrap().max(g3.ud_modulus_big(&kk).unwrap())
            }),
            deriv: OnceLock::new(),
            make: Box::new(move || {
                lin_comb(&x4, &f4.derivative().unwrap(), &y4, &g4.derivative().unwrap()).expect("same domain")
            }),
        })
    } else {
        None
    };
    Ok(UCFun::from_parts(f.domain().clone(), eval, modulus, sup, diff))
}

pub fn lin_comb_diff(x: &CReal, f: &UDiffFun, y: &CReal, g: &UDiffFun) -> Result<UDiffFun> {
    Ok(UDiffFun(lin_comb(x, f.as_uc(), y, g.as_uc())?))
}

/// `f g` on a common bounded domain.
pub fn product(f: &UCFun, g: &UCFun) -> Result<UCFun> {
    if !f.domain().compatible(g.domain()) {
        return Err(Error::Precondition("product of functions on different domains".into()));
    }
    let sf = f.require_sup("a product")?;
    let sg = g.require_sup("a product")?;
    let (f1, g1) = (f.clone(), g.clone());
    let eval: EvalFn = Arc::new(move |a: &BigRational| f1.eval_unchecked(a).mul(&g1.eval_unchecked(a)));
    let (f2, g2) = (f.clone(), g.clone());
    let (two_sf, two_sg) = (&sf * int(2), &sg * int(2));
    let modulus: Modulus = Arc::new(move |k| {
        g2.uc_modulus_big(&ceil_mul(&two_sf, k)).max(f2.uc_modulus_big(&ceil_mul(&two_sg, k)))
    });
    let diff = if f.is_differentiable() && g.is_differentiable() {
        let (f3, g3) = (f.clone(), g.clone());
        let (three_sf, three_sg) = (&sf * int(3), &sg * int(3));
        let (f4, g4) = (f.clone(), g.clone());
        Some(Diff {
            ud: Arc::new(move |k| {
                let sdg = g3.derivative().unwrap().sup().cloned().expect("bounded derivative");
                let a = f3.uc_modulus_big(&ceil_mul(&(sdg * int(3)), k));
                let b = g3.ud_modulus_big(&ceil_mul(&three_sf, k)).unwrap();
                let c = f3.ud_modulus_big(&ceil_mul(&three_sg, k)).unwrap();
                a.max(b).max(c)
            }),
            deriv: OnceLock::new(),
            make: Box::new(move || {
                let left = product(&f4.derivative().unwrap(), &g4).expect("bounded");
                let right = product(&f4, &g4.derivative().unwrap()).expect("bounded");
                lin_comb(&CReal::one(), &left, &CReal::one(), &right).expect("same domain")
            }),
        })
    } else {
        None
    };
    Ok(UCFun::from_parts(f.domain().clone(), eval, modulus, Some(&sf * &sg), diff))
}

pub fn product_diff(f: &UDiffFun, g: &UDiffFun) -> Result<UDiffFun> {
    Ok(UDiffFun(product(f.as_uc(), g.as_uc())?))
}

/// `|f|`.
pub fn abs_fun(f: &UCFun) -> UCFun {
    let f1 = f.clone();
    let f2 = f.clone();
    UCFun::from_parts(
        f.domain().clone(),
        Arc::new(move |a: &BigRational| f1.eval_unchecked(a).abs()),
        Arc::new(move |k| f2.uc_modulus_big(k)),
        f.sup().cloned(),
        None,
    )
}

/// `f o g`, for `g` taking values in the domain of `f`.
pub fn compose(f: &UCFun, g: &UCFun) -> UCFun {
    let (f1, g1) = (f.clone(), g.clone());
    let (f2, g2) = (f.clone(), g.clone());
    UCFun::from_parts(
        g.domain().clone(),
        Arc::new(move |a: &BigRational| eval_at_real_unchecked(&f1, &g1.eval_unchecked(a), Selection::Nearest)),
        Arc::new(move |k| g2.uc_modulus_big(&(f2.uc_modulus_big(k) * 2u32))),
        f.sup().cloned(),
        None,
    )
}

/// `a -> f(a + s)` on the correspondingly shifted domain.
pub fn shift_arg(f: &UCFun, s: &BigRational) -> Result<UCFun> {
    let domain = match f.domain() {
        Domain::Line => Domain::Line,
        Domain::Interval(iv) => {
            let sc = CReal::from_rational(s.clone());
            Domain::Interval(Interval::new(iv.lo().sub(&sc), iv.hi().sub(&sc))?)
        }
    };
    let (f1, f2, s1) = (f.clone(), f.clone(), s.clone());
    let diff = if f.is_differentiable() {
        let (f3, f4, s2) = (f.clone(), f.clone(), s.clone());
        Some(Diff {
            ud: Arc::new(move |k| f3.ud_modulus_big(k).unwrap()),
            deriv: OnceLock::new(),
            make: Box::new(move || shift_arg(&f4.derivative().unwrap(), &s2).expect("shift keeps the domain valid")),
        })
    } else {
        None
    };
    Ok(UCFun::from_parts(
        domain,
        Arc::new(move |a: &BigRational| f1.eval_unchecked(&(a + &s1))),
        Arc::new(move |k| f2.uc_modulus_big(k)),
        f.sup().cloned(),
        diff,
    ))
}

/// `f` restricted to a subinterval of its domain.
pub fn restrict(f: &UCFun, iv: Interval) -> UCFun {
    UCFun::from_parts(
        Domain::Interval(iv),
        f.0.eval.clone(),
        f.0.modulus.clone(),
        f.sup().cloned(),
        None,
    )
}

/// How a rational stand-in for a real argument is picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    /// Closest available approximation.
    Nearest,
    /// Approximation pushed right by half the allowed distance.
    Offset,
}

/// `f(x)` for a real `x` in the domain.
pub fn eval_at_real(f: &UCFun, x: &CReal) -> Result<CReal> {
    eval_at_real_with(f, x, Selection::Nearest)
}

pub fn eval_at_real_with(f: &UCFun, x: &CReal, sel: Selection) -> Result<CReal> {
    if let Some(q) = x.as_rational() {
        return f.eval(q);
    }
    if let Domain::Interval(iv) = f.domain() {
        if compare_certain(x, iv.lo(), 48) == Some(Comparison::Less)
            || compare_certain(x, iv.hi(), 48) == Some(Comparison::Greater)
        {
            return Err(Error::Domain("argument lies outside the domain".into()));
        }
    }
    Ok(eval_at_real_unchecked(f, x, sel))
}

fn eval_at_real_unchecked(f: &UCFun, x: &CReal, sel: Selection) -> CReal {
    if let Some(q) = x.as_rational() {
        return f.eval_unchecked(q);
    }
    let f = f.clone();
    let x = x.clone();
    CReal::from_fn(move |b| {
        let l = f.uc_modulus_big(&crate::exact::pow2(b + 1));
        let two_l = &l * 2u32;
        let mut a = x.approx_big(&two_l);
        if sel == Selection::Offset {
            a += BigRational::new(BigInt::one(), BigInt::from(two_l.clone()));
        }
        let a = f.domain().clamp(a, ceil_log2(&two_l) + 1);
        f.eval_unchecked(&a).approx_bits(b + 1)
    })
}

/// Rational grid covering the domain with spacing at most `1/l`, so every
/// point of the domain is within `1/l` of a grid point.
fn grid(iv: &Interval, l: &BigUint) -> Result<Vec<BigRational>> {
    let two_l = l * 2u32;
    let (lo, hi) = iv.inner(ceil_log2(&two_l) + 1);
    let width = &hi - &lo;
    let n = ceil_pos(&(&width * from_biguint(l)));
    let n = n.to_usize().filter(|&n| n < GRID_CAP).ok_or_else(|| {
        Error::Resource(format!("grid with {n} cells exceeds the cap of {GRID_CAP}"))
    })?;
    let step = width / int(n as i64);
    Ok((0..=n).map(|i| &lo + &step * int(i as i64)).collect())
}

/// Rational `B` with `|f(a)| <= B` on the domain: grid maximum rounded up at
/// precision `k`, plus `1/k` for the grid spacing.
pub fn bound(f: &UCFun, k: u64) -> Result<BigRational> {
    let iv = f.domain().require_interval("a bound")?;
    let pts = grid(iv, &f.uc_modulus(k))?;
    let kq = BigRational::new(BigInt::one(), BigInt::from(k.max(1)));
    let mut best = BigRational::zero();
    for a in &pts {
        let v = f.eval_unchecked(a).approx(k).abs();
        if v > best {
            best = v;
        }
    }
    Ok(best + &kq + &kq)
}

/// Rational `x` in the domain with `|f(x)| <= 1/k`, for `f` changing sign
/// between the ends of its domain.
pub fn approx_zero(f: &UCFun, k: u64) -> Result<BigRational> {
    let iv = f.domain().require_interval("a zero search")?;
    let k2 = 2 * k.max(1);
    let l = f.uc_modulus(k2);
    let (mut lo, mut hi) = iv.inner(ceil_log2(&(&l * 2u32)) + 1);
    let sign = |a: &BigRational| compare(&f.eval_unchecked(a), &CReal::zero(), k2);
    let s_lo = sign(&lo);
    if s_lo == Comparison::Within {
        return Ok(lo);
    }
    let s_hi = sign(&hi);
    if s_hi == Comparison::Within {
        return Ok(hi);
    }
    if s_lo == s_hi {
        return Err(Error::Precondition("no sign change detected at the domain ends".into()));
    }
    let stop = from_biguint(&l).recip();
    loop {
        if &hi - &lo <= stop {
            return Ok(lo);
        }
        let mid = (&lo + &hi) / int(2);
        match sign(&mid) {
            Comparison::Within => return Ok(mid),
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

/// Grid point `x` with `f(x)` within `1/k` of the supremum (or infimum).
pub fn approx_extremum(f: &UCFun, k: u64, which: Extremum) -> Result<(BigRational, CReal)> {
    let iv = f.domain().require_interval("an extremum search")?;
    let k3 = 3 * k.max(1);
    let pts = grid(iv, &f.uc_modulus(k3))?;
    let mut best: Option<(BigRational, BigRational)> = None;
    for a in pts {
        let v = f.eval_unchecked(&a).approx(2 * k3);
        let v = if which == Extremum::Max { v } else { -v };
        if best.as_ref().is_none_or(|(_, b)| &v > b) {
            best = Some((a, v));
        }
    }
    let (x, _) = best.expect("grid is nonempty");
    let value = f.eval_unchecked(&x);
    Ok((x, value))
}

/// Points `b1`, `b2` near an interior `x` with `f(b1) < f(x) < f(b2)`, given
/// a witness that `f'(x)` is apart from zero. Comparisons are retried at
/// doubled precision up to `max_bits`.
pub fn escape_extreme(
    f: &UDiffFun,
    x: &CReal,
    w: &SeparationWitness,
    max_bits: u32,
) -> Result<(BigRational, BigRational)> {
    let iv = f.domain().interval().ok_or_else(|| Error::Domain("needs a bounded domain".into()))?.clone();
    let df = f.deriv();
    let d = eval_at_real(&df, x)?;
    let s = w.k().clone();
    let s4 = &s * 4u32;
    let dq = d.approx_big(&s4);
    let quarter = BigRational::new(BigInt::one(), BigInt::from(s4.clone()));
    if dq.abs() < from_biguint(&s).recip() - &quarter {
        return Err(Error::Precondition("witness does not separate f'(x) from zero".into()));
    }
    let decreasing = dq.is_negative();

    let mut gap = None;
    for b in (16..=max_bits.max(16)).step_by(16) {
        let g = min_rat(&(x.lower_bound(b) - iv.lo().upper_bound(b)), &(iv.hi().lower_bound(b) - x.upper_bound(b)));
        if g.is_positive() {
            gap = Some(g);
            break;
        }
    }
    let gap = gap.ok_or_else(|| Error::Precondition("x is not certified interior".into()))?;

    let l = f.ud_modulus_big(&(&s * 3u32)).max(ceil_pos(&(int(2) / &gap)));
    let l1 = df.uc_modulus_big(&(&s * 2u32));
    let l2 = f.as_uc().uc_modulus_big(&(&l * &s * 24u32));
    let lq = from_biguint(&l);
    let delta = min_rat(
        &min_rat(&(from_biguint(&l1) * int(2)).recip(), &(from_biguint(&l2) * int(2)).recip()),
        &lq.recip(),
    );
    let xq = x.approx_big(&ceil_pos(&(int(4) / &delta)));
    let half = &delta / int(2);
    let right = &xq + &half + lq.recip();
    let left = &xq - &half - lq.recip();
    let (lower, upper) = if decreasing { (right, left) } else { (left, right) };

    let fx = eval_at_real(f.as_uc(), x)?;
    let fl = f.as_uc().eval_unchecked(&lower);
    let fu = f.as_uc().eval_unchecked(&upper);
    match (compare_certain(&fl, &fx, max_bits), compare_certain(&fu, &fx, max_bits)) {
        (Some(Comparison::Less), Some(Comparison::Greater)) => Ok((lower, upper)),
        (None, _) | (_, None) => Err(Error::PrecisionExhausted("comparison stayed within tolerance".into())),
        _ => Err(Error::Precondition("escape points failed to separate".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn q(x: &CReal, k: u64) -> BigRational {
        x.approx(k)
    }

    #[test]
    fn square_on_zero_two() {
        let f = poly_rat(&[int(0), int(0), int(1)], Interval::ints(0, 2).into()).unwrap();
        assert_eq!(f.eval(&rat(3, 2)).unwrap().as_rational(), Some(&rat(9, 4)));
        assert_eq!(f.deriv().eval(&rat(3, 2)).unwrap().as_rational(), Some(&int(3)));
        assert!(f.eval(&int(3)).is_err());
    }

    #[test]
    fn quadratic_needs_bounded_domain() {
        assert!(poly_rat(&[int(0), int(0), int(1)], Domain::Line).is_err());
        assert!(poly_rat(&[int(1), int(2)], Domain::Line).is_ok());
    }

    #[test]
    fn exp_minus_at_one() {
        let f = exp_scaled(int(-1), Interval::ints(0, 3).into()).unwrap();
        let v = f.eval(&int(1)).unwrap();
        let target = crate::series::e_pow(-1);
        assert_eq!(compare(&v, &target, 1 << 30), Comparison::Within);
    }

    #[test]
    fn bound_of_decaying_exp() {
        let f = exp_scaled(int(-1), Interval::ints(0, 3).into()).unwrap();
        let b = bound(f.as_uc(), 50).unwrap();
        assert!(b >= int(1) && b <= int(1) + rat(2, 50), "{b}");
    }

    #[test]
    fn zero_of_square_minus_two() {
        let f = poly_rat(&[int(-2), int(0), int(1)], Interval::ints(0, 2).into()).unwrap();
        let z = approx_zero(f.as_uc(), 100).unwrap();
        let v = &z * &z - int(2);
        assert!(v.abs() <= rat(1, 100));
        assert!((q(&crate::creal::sqrt_rational(&int(2)).unwrap(), 1000) - &z).abs() < rat(1, 10));
    }

    #[test]
    fn maximum_of_parabola() {
        let f = poly_rat(&[int(0), int(1), int(-1)], Interval::ints(0, 1).into()).unwrap();
        let (_, v) = approx_extremum(f.as_uc(), 100, Extremum::Max).unwrap();
        assert!((v.approx(1000) - rat(1, 4)).abs() <= rat(1, 100));
    }

    #[test]
    fn linear_combination_value() {
        let d: Domain = Interval::ints(0, 1).into();
        let a = poly_rat(&[int(0), int(1)], d.clone()).unwrap();
        let a2 = poly_rat(&[int(0), int(0), int(1)], d).unwrap();
        let f = lin_comb(&CReal::from_int(2), a.as_uc(), &CReal::from_int(3), a2.as_uc()).unwrap();
        assert_eq!(f.eval(&rat(1, 2)).unwrap().approx(1 << 20), rat(7, 4));
    }
}
