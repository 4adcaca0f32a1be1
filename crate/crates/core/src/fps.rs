//! Convergent formal power series.
//!
//! A series carries a growth certificate: for each radius `y > 0` a pair
//! `(C, r)` with `0 < r < 1` and `|x_n| y^n <= C r^n` for every `n`. The
//! certificate gives tail indices for evaluation and for the inner sums of
//! the quasi-formal shift `f(a + x) = sum_n (sum_m binom(m, n) x_m x^(m-n)) a^n`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};

use crate::creal::{compare_certain, CReal};
use crate::error::{Error, Result};
use crate::exact::{binomial, ceil_log2, ceil_pos, factorial, floor, format_rational, from_biguint, int, max_rat, pow2, rat};
use crate::report::{Check, Report};
use crate::series::{exp_dominance_bound, sum, ConvSeries};

type CoeffFn = dyn Fn(usize) -> CReal + Send + Sync;
type GrowthFn = dyn Fn(&BigRational) -> Growth + Send + Sync;

/// `|x_n| y^n <= c r^n` for all `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Growth {
    pub c: BigRational,
    pub r: BigRational,
}

impl Growth {
    fn new(c: BigRational, r: BigRational) -> Growth {
        Growth { c: round_up(&c), r }
    }

    /// Smallest `N` with `sum_{n > N} c r^n <= 1/k`.
    pub fn tail_index(&self, k: &BigUint) -> usize {
        geometric_tail(&self.c, &self.r, k)
    }
}

/// Upward rounding to a dyadic with at most 64 fractional bits beyond the
/// integer part, so certificates stay small.
fn round_up(q: &BigRational) -> BigRational {
    if q.denom().bits() <= 64 {
        return q.clone();
    }
    let s = BigRational::from_integer(BigInt::from(pow2(64)));
    let n = crate::exact::ceil(&(q * &s));
    BigRational::new(n, BigInt::from(pow2(64)))
}

fn geometric_tail(c: &BigRational, r: &BigRational, k: &BigUint) -> usize {
    if c.is_zero() {
        return 0;
    }
    let bits = 64 + ceil_log2(k);
    let scale = BigInt::from(pow2(bits));
    let up = |q: BigRational| BigRational::new(crate::exact::ceil(&(q * BigRational::from_integer(scale.clone()))), scale.clone());
    let target = from_biguint(k).recip();
    let mut t = up(c * r / (BigRational::one() - r));
    let mut n = 0;
    while t > target {
        t = up(&t * r);
        n += 1;
    }
    n
}

/// Formal power series `sum x_n a^n` with memoized coefficients.
#[derive(Clone)]
pub struct Fps {
    coeff: Arc<CoeffFn>,
    memo: Arc<Mutex<HashMap<usize, CReal>>>,
}

impl Fps {
    pub fn new(coeff: impl Fn(usize) -> CReal + Send + Sync + 'static) -> Fps {
        Fps { coeff: Arc::new(coeff), memo: Arc::new(Mutex::new(HashMap::new())) }
    }

    pub fn coeff(&self, n: usize) -> CReal {
        if let Some(x) = self.memo.lock().unwrap().get(&n) {
            return x.clone();
        }
        let x = (self.coeff)(n);
        self.memo.lock().unwrap().entry(n).or_insert(x).clone()
    }

    pub fn coeffs(&self, count: usize) -> Vec<CReal> {
        (0..count).map(|n| self.coeff(n)).collect()
    }
}

/// Formal power series with a growth certificate.
#[derive(Clone)]
pub struct ConvFps {
    base: Fps,
    growth: Arc<GrowthFn>,
}

impl ConvFps {
    pub fn new(
        coeff: impl Fn(usize) -> CReal + Send + Sync + 'static,
        growth: impl Fn(&BigRational) -> Growth + Send + Sync + 'static,
    ) -> ConvFps {
        ConvFps { base: Fps::new(coeff), growth: Arc::new(growth) }
    }

    pub fn base(&self) -> &Fps {
        &self.base
    }

    pub fn coeff(&self, n: usize) -> CReal {
        self.base.coeff(n)
    }

    pub fn coeffs(&self, count: usize) -> Vec<CReal> {
        self.base.coeffs(count)
    }

    /// Certificate at radius `y > 0`.
    pub fn growth(&self, y: &BigRational) -> Growth {
        (self.growth)(y)
    }

    /// Checks `|x_n| y^n <= C r^n` on the first `count` coefficients, each
    /// compared through an upper bound of `|x_n|`.
    pub fn spot_check(&self, y: &BigRational, count: usize) -> bool {
        let g = self.growth(y);
        let mut yn = BigRational::one();
        let mut rn = BigRational::one();
        for n in 0..count {
            let x = self.coeff(n);
            let lhs = match x.as_rational() {
                Some(q) => q.abs(),
                None => x.approx_bits(64).abs(),
            } * &yn;
            if lhs > &g.c * &rn {
                return false;
            }
            yn *= y;
            rn *= &g.r;
        }
        true
    }

    /// Truncation dump, one coefficient per line: `n p q` for exact
    /// coefficients, `n <decimal> ±1e-d` otherwise.
    pub fn dump(&self, count: usize, digits: usize) -> String {
        let mut out = String::new();
        for (n, x) in self.coeffs(count).iter().enumerate() {
            match x.as_rational() {
                Some(q) => writeln!(out, "{n} {} {}", q.numer(), q.denom()),
                None => writeln!(out, "{n} {}", x.render(digits)),
            }
            .expect("writing to a string");
        }
        out
    }
}

/// The zero series.
pub fn zero() -> ConvFps {
    ConvFps::new(|_| CReal::zero(), |_| Growth::new(BigRational::zero(), rat(1, 2)))
}

/// The unit series.
pub fn one() -> ConvFps {
    polynomial(vec![CReal::one()])
}

/// `sum_{n <= d} x_n a^n`.
pub fn polynomial(coeffs: Vec<CReal>) -> ConvFps {
    let bounds: Vec<BigRational> = coeffs.iter().map(|x| x.upper_abs()).collect();
    let cs = coeffs.clone();
    ConvFps::new(
        move |n| cs.get(n).cloned().unwrap_or_else(CReal::zero),
        move |y| {
            let two_y = y * int(2);
            let mut c = BigRational::zero();
            let mut p = BigRational::one();
            for b in &bounds {
                c = max_rat(&c, &(b * &p));
                p *= &two_y;
            }
            Growth::new(c, rat(1, 2))
        },
    )
}

pub fn polynomial_rat(coeffs: &[BigRational]) -> ConvFps {
    polynomial(coeffs.iter().cloned().map(CReal::from_rational).collect())
}

/// `Exp(a) = sum a^n / n!`.
pub fn exp() -> ConvFps {
    ConvFps::new(
        |n| CReal::from_rational(from_biguint(&factorial(n as u64)).recip()),
        |y| {
            // (2y)^n / n! is largest at n = floor(2y)
            let two_y = y * int(2);
            let m = floor(&two_y).to_u64().expect("radius fits in u64");
            let c = num::pow(two_y, m as usize) / from_biguint(&factorial(m));
            Growth::new(c, rat(1, 2))
        },
    )
}

/// `x f + y g`.
pub fn lin_comb(x: &CReal, f: &ConvFps, y: &CReal, g: &ConvFps) -> ConvFps {
    let (x1, f1, y1, g1) = (x.clone(), f.clone(), y.clone(), g.clone());
    let (xa, ya) = (x.upper_abs(), y.upper_abs());
    let (f2, g2) = (f.clone(), g.clone());
    ConvFps::new(
        move |n| x1.mul(&f1.coeff(n)).add(&y1.mul(&g1.coeff(n))),
        move |r| {
            let (a, b) = (f2.growth(r), g2.growth(r));
            Growth::new(&xa * &a.c + &ya * &b.c, max_rat(&a.r, &b.r))
        },
    )
}

/// Cauchy product `sum_n (sum_{i <= n} x_i z_{n-i}) a^n`.
pub fn cauchy_product(f: &ConvFps, g: &ConvFps) -> ConvFps {
    let (f1, g1) = (f.clone(), g.clone());
    let (f2, g2) = (f.clone(), g.clone());
    ConvFps::new(
        move |n| {
            let terms = (0..=n)
                .filter_map(|i| {
                    let a = f1.coeff(i);
                    if is_zero(&a) {
                        return None;
                    }
                    let b = g1.coeff(n - i);
                    (!is_zero(&b)).then(|| a.mul(&b))
                })
                .collect();
            CReal::sum(terms)
        },
        move |y| {
            // at radius 2y each factor decays like 2^-n, and (n+1) 2^-n <= 4/3 (3/4)^n
            let y2 = y * int(2);
            let (a, b) = (f2.growth(&y2), g2.growth(&y2));
            Growth::new(rat(4, 3) * a.c * b.c, rat(3, 4))
        },
    )
}

fn is_zero(x: &CReal) -> bool {
    x.as_rational().is_some_and(|q| q.is_zero())
}

/// `f(x a) = sum x_n x^n a^n`.
pub fn scale_arg(f: &ConvFps, x: &CReal) -> ConvFps {
    let (f1, f2) = (f.clone(), f.clone());
    let xa = max_rat(&x.upper_abs(), &rat(1, 1 << 20));
    let powers = Powers::new(x.clone());
    ConvFps::new(move |n| f1.coeff(n).mul(&powers.get(n)), move |y| f2.growth(&(y * &xa)))
}

/// Formal derivative `sum (n+1) x_{n+1} a^n`.
pub fn formal_derivative(f: &ConvFps) -> ConvFps {
    let (f1, f2) = (f.clone(), f.clone());
    ConvFps::new(
        move |n| f1.coeff(n + 1).scale(&int(n as i64 + 1)),
        move |y| {
            let g = f2.growth(&(y * int(2)));
            Growth::new(int(2) * &g.c * &g.r / (int(3) * y), rat(3, 4))
        },
    )
}

/// Formal primitive `sum x_{n-1} / n a^n` with zero constant term.
pub fn formal_primitive(f: &ConvFps) -> ConvFps {
    let (f1, f2) = (f.clone(), f.clone());
    ConvFps::new(
        move |n| if n == 0 { CReal::zero() } else { f1.coeff(n - 1).scale(&rat(1, n as i64)) },
        move |y| {
            let g = f2.growth(y);
            Growth::new(y * &g.c / &g.r, g.r)
        },
    )
}

/// Memoized powers of a real.
#[derive(Clone)]
struct Powers {
    x: CReal,
    memo: Arc<Mutex<Vec<CReal>>>,
}

impl Powers {
    fn new(x: CReal) -> Powers {
        Powers { x, memo: Arc::new(Mutex::new(vec![CReal::one()])) }
    }

    fn get(&self, n: usize) -> CReal {
        let mut m = self.memo.lock().unwrap();
        while m.len() <= n {
            let next = m.last().unwrap().mul(&self.x);
            m.push(next);
        }
        m[n].clone()
    }
}

/// Quasi-formal shift `f(a + x)`.
pub fn quasi_shift(f: &ConvFps, x: &CReal) -> ConvFps {
    if x.as_rational().is_some_and(|q| q.is_zero()) {
        return f.clone();
    }
    let xa = x.upper_abs();
    let inner = f.growth(&(&xa + int(1)));
    let powers = Powers::new(x.clone());
    let f1 = f.clone();
    let f2 = f.clone();
    ConvFps::new(
        move |n| {
            // binom(m, n) |x|^(m-n) <= (|x| + 1)^m, so the terms are below C r^m
            let (f, p, g) = (f1.clone(), powers.clone(), inner.clone());
            let s = ConvSeries::new(
                move |j| {
                    let m = n + j;
                    f.coeff(m).mul(&p.get(j)).scale(&from_biguint(&binomial(m as u64, n as u64)))
                },
                move |k| g.tail_index(k),
            );
            sum(&s)
        },
        move |y| {
            let g = f2.growth(&(&xa + y * int(2)));
            Growth::new(&g.c / (BigRational::one() - &g.r), rat(1, 2))
        },
    )
}

/// Value `sum x_n a^n` at a real point.
pub fn eval(f: &ConvFps, a: &CReal) -> CReal {
    let y = max_rat(&a.upper_abs(), &rat(1, 1 << 20));
    let g = f.growth(&y);
    let powers = Powers::new(a.clone());
    let f1 = f.clone();
    sum(&ConvSeries::new(move |n| f1.coeff(n).mul(&powers.get(n)), move |k| g.tail_index(k)))
}

/// Index of the first nonzero coefficient among the first `max`. Inexact
/// coefficients must separate from zero within `max_bits`.
pub fn order(f: &ConvFps, max: usize, max_bits: u32) -> Result<Option<usize>> {
    for n in 0..max {
        let x = f.coeff(n);
        if let Some(q) = x.as_rational() {
            if q.is_zero() {
                continue;
            }
            return Ok(Some(n));
        }
        match compare_certain(&x, &CReal::zero(), max_bits) {
            Some(_) => return Ok(Some(n)),
            None => return Err(Error::PrecisionExhausted(format!("coefficient {n} not separated from zero"))),
        }
    }
    Ok(None)
}

/// `f((a+x)+y) = f(a+(x+y))` and `(f g)(a+x) = f(a+x) g(a+x)` on the first
/// `count` coefficients. Residuals are maxima over the compared coefficients.
pub fn verify_shift_algebra(f: &ConvFps, g: &ConvFps, x: &CReal, y: &CReal, count: usize, tol: &BigRational) -> Report {
    let mut report = Report::default();
    let twice = quasi_shift(&quasi_shift(f, x), y);
    let once = quasi_shift(f, &x.add(y));
    report.push(max_residual("repeated_shift", &twice, &once, count, tol));
    let lhs = quasi_shift(&cauchy_product(f, g), x);
    let rhs = cauchy_product(&quasi_shift(f, x), &quasi_shift(g, x));
    report.push(max_residual("shift_product", &lhs, &rhs, count, tol));
    report
}

fn max_residual(name: &str, f: &ConvFps, g: &ConvFps, count: usize, tol: &BigRational) -> Check {
    let mut worst = Check::new(name, BigRational::zero(), tol.clone());
    for n in 0..count {
        let c = Check::identity(name, &f.coeff(n), &g.coeff(n), tol.clone());
        if c.residual > worst.residual {
            worst = c;
        }
    }
    worst
}

/// `(N) int_u^v f = F(v) - F(u)` for the formal primitive `F`.
pub fn newton_integral(f: &ConvFps, u: &CReal, v: &CReal) -> CReal {
    let p = formal_primitive(f);
    eval(&p, v).sub(&eval(&p, u))
}

/// `p(a) Exp(-a)` as a series.
pub fn polyexp_series(p: &[CReal]) -> ConvFps {
    cauchy_product(&polynomial(p.to_vec()), &scale_arg(&exp(), &CReal::from_int(-1)))
}

/// Cutoff `Y` with `|sum x_i i! - (N) int_0^Y p(a) Exp(-a)| <= 1/(2k)`.
///
/// `int_0^Y a^i e^-a = i! (1 - e^-Y sum_{j <= i} Y^j / j!)`, so for `Y >= 1` the
/// gap is at most `S Y^d e^-Y` with `S = sum |x_i| (i+1)!`.
pub fn newton_cutoff(p: &[CReal], k: u64) -> BigUint {
    let d = p.len().saturating_sub(1) as u32;
    let s: BigRational = p
        .iter()
        .enumerate()
        .map(|(i, x)| x.upper_abs() * from_biguint(&factorial(i as u64 + 1)))
        .sum();
    if s.is_zero() {
        return BigUint::one();
    }
    let kk = ceil_pos(&(s * int(2 * k.max(1) as i64)));
    exp_dominance_bound(d, &kk).max(BigUint::one())
}

/// Improper Newton integral `int_0^inf p(a) Exp(-a)` within `1/k`.
pub fn newton_improper_polyexp(p: &[CReal], k: u64) -> CReal {
    let y = newton_cutoff(p, k);
    newton_integral(&polyexp_series(p), &CReal::zero(), &CReal::from_rational(from_biguint(&y)))
}

/// `sum x_i i!`, the common value of both improper routes.
pub fn euler_sum(p: &[CReal]) -> CReal {
    CReal::sum(p.iter().enumerate().map(|(i, x)| x.scale(&from_biguint(&factorial(i as u64)))).collect())
}

/// Newton linearity (`x f + g`), additivity and shift, each within `3/k`.
#[allow(clippy::too_many_arguments)]
pub fn verify_newton_algebra(
    f: &ConvFps,
    g: &ConvFps,
    u: &CReal,
    v: &CReal,
    w: &CReal,
    x: &CReal,
    shift: &CReal,
    k: u64,
) -> Report {
    let tol = BigRational::new(3.into(), k.max(1).into());
    let mut report = Report::default();
    let comb = lin_comb(x, f, &CReal::one(), g);
    let lhs = newton_integral(&comb, u, v);
    let rhs = x.mul(&newton_integral(f, u, v)).add(&newton_integral(g, u, v));
    report.push(Check::identity("linearity", &lhs, &rhs, tol.clone()));
    let uw = newton_integral(f, u, w);
    let split = newton_integral(f, u, v).add(&newton_integral(f, v, w));
    report.push(Check::identity("additivity", &uw, &split, tol.clone()));
    let moved = newton_integral(f, &u.add(shift), &v.add(shift));
    let shifted = newton_integral(&quasi_shift(f, shift), u, v);
    report.push(Check::identity("shift", &moved, &shifted, tol));
    report
}

/// Exact coefficients of `p(a + s)`.
pub fn shift_poly_exact(p: &[BigRational], s: &BigRational) -> Vec<BigRational> {
    (0..p.len())
        .map(|j| {
            (j..p.len())
                .map(|m| &p[m] * from_biguint(&binomial(m as u64, j as u64)) * num::pow(s.clone(), m - j))
                .sum()
        })
        .collect()
}

/// Improper forms on `p(a) Exp(-a)`: linearity in `x p + q`, the split
/// `int_0^inf = int_0^s + e^-s int_0^inf p(a+s) Exp(-a)`, and the shifted
/// integrand's value against `sum c_j j!` from exact coefficients.
pub fn verify_newton_improper(p: &[BigRational], q: &[BigRational], x: &BigRational, s: u32, k: u64) -> Report {
    let k = k.max(1);
    let tol = BigRational::new(3.into(), k.into());
    let k4 = 4 * k;
    let creals = |v: &[BigRational]| v.iter().cloned().map(CReal::from_rational).collect::<Vec<_>>();
    let mut report = Report::default();

    let len = p.len().max(q.len());
    let comb: Vec<BigRational> = (0..len)
        .map(|i| x * p.get(i).cloned().unwrap_or_default() + q.get(i).cloned().unwrap_or_default())
        .collect();
    let kl = (4 * k) * (x.abs().ceil().to_integer().to_u64().unwrap_or(1) + 2);
    let lhs = newton_improper_polyexp(&creals(&comb), kl);
    let rhs = newton_improper_polyexp(&creals(p), kl)
        .scale(x)
        .add(&newton_improper_polyexp(&creals(q), kl));
    report.push(Check::identity("improper_linearity", &lhs, &rhs, tol.clone()));

    let sq = int(s as i64);
    let pf = polynomial(creals(p));
    let shifted_coeffs = quasi_shift(&pf, &CReal::from_rational(sq.clone())).coeffs(p.len());
    let head = newton_integral(&polyexp_series(&creals(p)), &CReal::zero(), &CReal::from_rational(sq.clone()));
    let e_s = crate::series::exp_rational(&-sq.clone());
    // e^-s <= 1, so the tail is within 1/(4k) when its integral is
    let tail = newton_improper_polyexp(&shifted_coeffs, k4).mul(&e_s);
    let whole = newton_improper_polyexp(&creals(p), k4);
    report.push(Check::identity("improper_additivity", &whole, &head.add(&tail), tol.clone()));

    let expanded = euler_sum(&creals(&shift_poly_exact(p, &sq)));
    report.push(Check::identity("improper_shift", &newton_improper_polyexp(&shifted_coeffs, k4), &expanded, tol));
    report
}

/// Formats coefficient bounds for diagnostics.
pub fn describe_growth(g: &Growth) -> String {
    format!("C={} r={}", format_rational(&g.c), format_rational(&g.r))
}
