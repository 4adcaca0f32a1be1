//! Refuting candidate integer relations `a_n e^n + ... + a_1 e + a_0 = 0`.
//!
//! With `p_m(a) = a^m ((a-1)...(a-n))^(m+1)` and `I_i(m) = int_0^i p_m(a) e^-a`,
//! the quantities `A(m) = sum a_i e^i I_i(m)` and the integer
//! `B(m) = sum a_i int_0^inf p_m(a+i) e^-a` would satisfy `A(m) + B(m) = 0` if
//! the relation held. `B(m)` is exact; `A(m)` is enclosed. A certified
//! `|A(m)| < m! <= |B(m)|` refutes the relation.

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, Zero};
use rayon::prelude::*;

use crate::creal::CReal;
use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, format_rational, from_big, int, RatInterval};
use crate::fps::{newton_integral, polyexp_series};
use crate::quadrature::integrate_big;
use crate::series::e_pow;
use crate::ucfun::{exp_scaled, poly, product, Domain, Interval};

/// Integer relation `sum a_i e^i = 0` with `a_0 != 0` and `a_n != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateRelation {
    coeffs: Vec<BigInt>,
}

impl CandidateRelation {
    /// Coefficients `a_0, ..., a_n`.
    pub fn new(coeffs: Vec<BigInt>) -> Result<CandidateRelation> {
        if coeffs.len() < 2 {
            return Err(Error::Precondition("relation needs degree n >= 1".into()));
        }
        if coeffs[0].is_zero() || coeffs.last().unwrap().is_zero() {
            return Err(Error::Precondition("relation needs a_0 != 0 and a_n != 0".into()));
        }
        Ok(CandidateRelation { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<CandidateRelation> {
        CandidateRelation::new(coeffs.iter().map(|&a| BigInt::from(a)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(a: &[BigInt], e: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for _ in 0..e {
        out = poly_mul(&out, a);
    }
    out
}

/// Coefficients (lowest first) of `p_m(a) = a^m ((a-1)...(a-n))^(m+1)`.
pub fn build_pm(n: usize, m: usize) -> Vec<BigInt> {
    let mut base = vec![BigInt::one()];
    for j in 1..=n {
        base = poly_mul(&base, &[BigInt::from(-(j as i64)), BigInt::one()]);
    }
    let mut out = vec![BigInt::zero(); m];
    out.extend(poly_pow(&base, m + 1));
    out
}

/// Coefficients of `p(a + s)` by binomial expansion.
pub fn shift_int_poly(p: &[BigInt], s: i64) -> Vec<BigInt> {
    let s = BigInt::from(s);
    (0..p.len())
        .map(|j| {
            (j..p.len())
                .map(|m| &p[m] * BigInt::from(binomial(m as u64, j as u64)) * num::pow(s.clone(), m - j))
                .sum()
        })
        .collect()
}

/// `sum c_j j!`, the value of `int_0^inf q(a) e^-a` for `q = sum c_j a^j`.
pub fn euler_value(c: &[BigInt]) -> BigInt {
    c.iter().enumerate().map(|(j, x)| x * BigInt::from(factorial(j as u64))).sum()
}

/// `B(m) = sum_i a_i sum_j c_{i,j} j!` with `c_{i,j}` the coefficients of `p_m(a+i)`.
pub fn compute_b(rel: &CandidateRelation, m: usize) -> BigInt {
    let pm = build_pm(rel.degree(), m);
    rel.coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a * euler_value(&shift_int_poly(&pm, i as i64)))
        .sum()
}

fn eval_int_poly(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// `B(m)` again, as `sum_i a_i sum_j p_m^(j)(i)`: repeated differentiation of
/// `p_m` in place of the shifted expansion.
pub fn compute_b_by_derivatives(rel: &CandidateRelation, m: usize) -> BigInt {
    let mut total = BigInt::zero();
    for (i, a) in rel.coeffs.iter().enumerate() {
        let x = BigInt::from(i);
        let mut d = build_pm(rel.degree(), m);
        let mut s = BigInt::zero();
        while !d.is_empty() {
            s += eval_int_poly(&d, &x);
            d = d.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect();
        }
        total += a * s;
    }
    total
}

/// `a_0 (-1)^(n(m+1)) (n!)^(m+1) m!`, the residue of `B(m)` modulo `(m+1)!`.
pub fn b_residue(rel: &CandidateRelation, m: usize) -> BigInt {
    let n = rel.degree();
    let sign = if (n * (m + 1)) % 2 == 1 { -BigInt::one() } else { BigInt::one() };
    let nf = BigInt::from(factorial(n as u64));
    &rel.coeffs[0] * sign * num::pow(nf, m + 1) * BigInt::from(factorial(m as u64))
}

/// How the integrals `I_i(m)` are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Route {
    /// Formal primitive of `p_m(a) Exp(-a)` evaluated at the ends.
    #[default]
    Newton,
    /// Riemann sums.
    Riemann,
}

/// `sum_i |a_i| 3^i`, an upper bound of `w = sum |a_i| e^i`.
fn weight_bound(rel: &CandidateRelation) -> BigInt {
    rel.coeffs.iter().enumerate().map(|(i, a)| a.abs() * num::pow(BigInt::from(3), i)).sum()
}

/// `A(m) = sum a_i e^i I_i(m)` as a real, with the integrals taken so that
/// the result is within `1/k` when approximated to `1/(2k)`.
fn a_value(rel: &CandidateRelation, m: usize, k: u64, route: Route) -> Result<CReal> {
    let n = rel.degree();
    let pm: Vec<CReal> = build_pm(n, m).into_iter().map(|c| CReal::from_rational(from_big(c))).collect();
    let mut terms = Vec::new();
    let kk = (weight_bound(rel) * BigInt::from(2 * k)).to_biguint().expect("positive");
    let series = polyexp_series(&pm);
    for (i, a) in rel.coeffs.iter().enumerate().skip(1) {
        let upper = CReal::from_int(i as i64);
        let integral = match route {
            Route::Newton => newton_integral(&series, &CReal::zero(), &upper),
            Route::Riemann => {
                let dom: Domain = Interval::ints(0, n as i64).into();
                let f = product(poly(pm.clone(), dom.clone())?.as_uc(), exp_scaled(int(-1), dom)?.as_uc())?;
                integrate_big(&f, &CReal::zero(), &upper, &kk)?.value
            }
        };
        terms.push(e_pow(i as i64).mul(&integral).scale(&from_big(a.clone())));
    }
    Ok(CReal::sum(terms))
}

/// Rational interval of width at most `2/k` containing `A(m)`.
pub fn enclose_a(rel: &CandidateRelation, m: usize, k: u64, route: Route) -> Result<RatInterval> {
    let k = k.max(1);
    let v = a_value(rel, m, k, route)?;
    let c = v.approx(2 * k);
    let r = BigRational::new(BigInt::one(), BigInt::from(k));
    Ok(RatInterval::ball(&c, &r))
}

/// `A(m)` through the relation's residual: `(sum a_i e^i) I(m) - B(m)`, where
/// `I(m) = sum c_j j!` over the coefficients of `p_m`.
pub fn a_via_residual(rel: &CandidateRelation, m: usize) -> CReal {
    let r = CReal::sum(
        rel.coeffs.iter().enumerate().map(|(i, a)| e_pow(i as i64).scale(&from_big(a.clone()))).collect(),
    );
    let i_m = euler_value(&build_pm(rel.degree(), m));
    r.scale(&from_big(i_m)).sub(&CReal::from_rational(from_big(compute_b(rel, m))))
}

/// `y z^m` with `y = w (n+1) n^(n+2)`, `z = n^(n+1)` and `w` bounded using `e < 3`.
pub fn a_bound(rel: &CandidateRelation, m: usize) -> BigInt {
    let n = BigInt::from(rel.degree());
    let nn = rel.degree();
    weight_bound(rel) * (&n + 1) * num::pow(n.clone(), nn + 2) * num::pow(num::pow(n, nn + 1), m)
}

/// One row of the report.
#[derive(Clone, Debug, PartialEq)]
pub struct HilbertRow {
    pub m: usize,
    pub b: BigInt,
    pub b_mod_mfact: BigInt,
    pub congruence_ok: bool,
    pub coprime: bool,
    pub a_enclosure: RatInterval,
    pub bound_ok: bool,
    /// `gcd(m+1, a_0 n!) = 1`, `|B(m)| >= m!` and `|A(m)| < m!` all certified.
    pub verdict: bool,
}

impl HilbertRow {
    /// Serialization record: `m B B_mod_mfact congruence_ok A_lo A_hi bound_ok verdict`.
    pub fn record(&self) -> String {
        format!(
            "{} {} {} {} {} {} {} {}",
            self.m,
            self.b,
            self.b_mod_mfact,
            self.congruence_ok,
            format_rational(&self.a_enclosure.lo),
            format_rational(&self.a_enclosure.hi),
            self.bound_ok,
            self.verdict
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The relation is false; `m` witnesses it with margin.
    Refuted { m: usize },
    /// No witness up to the requested `m`.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HilbertReport {
    pub relation: CandidateRelation,
    pub rows: Vec<HilbertRow>,
    pub overall: Verdict,
}

/// Precision for the `A(m)` enclosure.
pub const A_PRECISION: u64 = 1000;

pub fn hilbert_row(rel: &CandidateRelation, m: usize, route: Route) -> Result<HilbertRow> {
    let b = compute_b(rel, m);
    let mf = BigInt::from(factorial(m as u64));
    let m1f = BigInt::from(factorial(m as u64 + 1));
    let b_mod_mfact = b.mod_floor(&mf);
    let congruence_ok = b_mod_mfact.is_zero() && (&b - b_residue(rel, m)).mod_floor(&m1f).is_zero();
    let a0_nf = &rel.coeffs[0] * BigInt::from(factorial(rel.degree() as u64));
    let coprime = BigInt::from(m + 1).gcd(&a0_nf).is_one();
    let a_enclosure = enclose_a(rel, m, A_PRECISION, route)?;
    let bound = from_big(a_bound(rel, m));
    let bound_ok = a_enclosure.mag() <= bound;
    let mfq = from_big(mf.clone());
    let verdict = coprime && b.abs() >= mf && a_enclosure.mag() < mfq;
    Ok(HilbertRow { m, b, b_mod_mfact, congruence_ok, coprime, a_enclosure, bound_ok, verdict })
}

/// Rows `m = 1..=m_max`; the witness is the first row whose verdict holds
/// with `sup |A| <= m!/10`, so that `|B(m)| - sup |A| >= (9/10) m!`.
pub fn hilbert_report(rel: &CandidateRelation, m_max: usize, route: Route) -> Result<HilbertReport> {
    let rows: Vec<HilbertRow> = (1..=m_max).into_par_iter().map(|m| hilbert_row(rel, m, route)).collect::<Result<_>>()?;
    let overall = rows
        .iter()
        .find(|r| r.verdict && has_margin(r))
        .map(|r| Verdict::Refuted { m: r.m })
        .unwrap_or(Verdict::Inconclusive);
    Ok(HilbertReport { relation: rel.clone(), rows, overall })
}

fn has_margin(r: &HilbertRow) -> bool {
    let mf = from_big(BigInt::from(factorial(r.m as u64)));
    r.a_enclosure.mag() * int(10) <= mf
}

/// `|B(m)| - sup |A| >= (9/10) m!`, checked exactly.
pub fn verdict_is_sound(r: &HilbertRow) -> bool {
    let mf = from_big(BigInt::from(factorial(r.m as u64)));
    from_big(r.b.abs()) - r.a_enclosure.mag() >= mf * BigRational::new(9.into(), 10.into())
}
