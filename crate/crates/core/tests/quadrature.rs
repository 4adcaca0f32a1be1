use hmcreal::creal::sqrt_rational;
use hmcreal::exact::{ceil_pos, from_biguint, int, rat};
use hmcreal::fps::shift_poly_exact;
use hmcreal::quadrature::*;
use hmcreal::series::e_pow;
use hmcreal::ucfun::*;
use hmcreal::{BigRational, CReal};
use num::{Signed, ToPrimitive};
use proptest::prelude::*;

fn dom(lo: i64, hi: i64) -> Domain {
    Interval::ints(lo, hi).into()
}

fn q(n: i64, d: i64) -> CReal {
    CReal::from_rational(rat(n, d))
}

fn zoo() -> Vec<(&'static str, UCFun, i64, i64)> {
    let p = poly(vec![q(1, 1), q(-3, 2), q(0, 1), q(1, 4)], dom(-1, 2)).unwrap();
    let e = exp_scaled(rat(1, 2), dom(0, 2)).unwrap();
    let pe = polyexp(q(2, 1), 2, rat(-1, 1), dom(0, 3)).unwrap();
    let a = abs_fun(poly(vec![q(-1, 2), q(1, 1)], dom(0, 1)).unwrap().as_uc());
    vec![("poly", p.into_uc(), -1, 2), ("exp", e.into_uc(), 0, 2), ("polyexp", pe.into_uc(), 0, 3), ("abs", a, 0, 1)]
}

/// Left-tagged uniform sum whose mesh follows the uniform-continuity
/// modulus only: error at most `1/k`.
fn left_schedule(f: &UCFun, u: i64, v: i64, k: u64) -> CReal {
    let w = int(v - u);
    let l = f.uc_modulus_big(&ceil_pos(&(&w * int(k as i64))));
    let n = ceil_pos(&(&w * from_biguint(&l))).to_usize().unwrap();
    let p = TaggedPartition::uniform_left(&int(u), &int(v), n).unwrap();
    riemann_sum(f, &p).unwrap()
}

#[test]
fn independent_schedules_agree() {
    for (name, f, u, v) in zoo() {
        for k in [10u64, 100] {
            let mid = integrate(&f, &CReal::from_int(u), &CReal::from_int(v), 2 * k).unwrap().value;
            let left = left_schedule(&f, u, v, 2 * k);
            let d = (mid.approx(8 * k) - left.approx(8 * k)).abs();
            assert!(d <= rat(2, k as i64), "{name} k={k} d={d}");
        }
    }
}

#[test]
fn nonnegative_integrands() {
    let sq = poly(vec![q(-1, 3), q(1, 1)], dom(-1, 1)).unwrap();
    let sq2 = product(sq.as_uc(), sq.as_uc()).unwrap();
    let e = exp_scaled(rat(-3, 1), dom(0, 2)).unwrap();
    for (f, u, v) in [(sq2, -1, 1), (e.into_uc(), 0, 2)] {
        for k in [1u64, 10, 100, 1000] {
            let r = integrate(&f, &CReal::from_int(u), &CReal::from_int(v), k).unwrap().value;
            assert!(r.approx(4 * k) >= rat(-1, k as i64) - rat(1, 4 * k as i64));
        }
    }
}

#[test]
fn abs_value_inequality() {
    for (name, f, u, v) in zoo() {
        let k = 50u64;
        let (a, b) = (CReal::from_int(u), CReal::from_int(v));
        let i = integrate(&f, &a, &b, k).unwrap().value.approx(4 * k).abs();
        let ia = integrate(&abs_fun(&f), &a, &b, k).unwrap().value.approx(4 * k);
        assert!(i <= ia + rat(2, k as i64) + rat(1, 2 * k as i64), "{name}");
    }
}

#[test]
fn irrational_endpoints() {
    let s = sqrt_rational(&int(2)).unwrap();
    let p = poly(vec![q(0, 1), q(0, 1), q(1, 1)], dom(0, 2)).unwrap();
    let r = integrate(p.as_uc(), &CReal::zero(), &s, 200).unwrap().value;
    let exact = s.pow(3).scale(&rat(1, 3));
    assert!((r.approx(1000) - exact.approx(1000)).abs() <= rat(1, 200) + rat(2, 1000));
}

fn improper(p: &[BigRational], k: u64) -> CReal {
    let c: Vec<CReal> = p.iter().cloned().map(CReal::from_rational).collect();
    integrate_improper_polyexp(&c, k).unwrap()
}

fn euler(p: &[BigRational]) -> BigRational {
    let mut f = BigRational::from_integer(1.into());
    let mut s = BigRational::from_integer(0.into());
    for (i, c) in p.iter().enumerate() {
        if i > 0 {
            f *= int(i as i64);
        }
        s += c * &f;
    }
    s
}

#[test]
fn improper_linearity_and_shift() {
    let k = 60u64;
    let tol = rat(3, k as i64);
    let p = vec![rat(1, 1), rat(-1, 2), rat(1, 3)];
    let r = vec![rat(0, 1), rat(2, 1)];
    let x = rat(-3, 2);
    let mut comb = p.clone();
    for (i, c) in r.iter().enumerate() {
        comb[i] += &x * c;
    }
    let lhs = improper(&comb, 4 * k).approx(4 * k);
    let rhs = improper(&p, 4 * k).approx(4 * k) + &x * improper(&r, 4 * k).approx(4 * k);
    assert!((lhs - rhs).abs() <= tol);

    // int_0^inf p(a + i) e^{-a} by coefficient expansion and by quadrature
    for i in 0..3 {
        let shifted = shift_poly_exact(&p, &int(i));
        let by_coeffs = euler(&shifted);
        let by_quad = improper(&shifted, 2 * k).approx(4 * k);
        assert!((by_quad - &by_coeffs).abs() <= tol, "shift {i}");
        // int_0^inf p e^{-a} = int_0^i p e^{-a} + e^{-i} int_0^inf p(a + i) e^{-a}
        if i > 0 {
            let pieces = polyexp_sum(&p, i);
            let head = integrate(&pieces, &CReal::zero(), &CReal::from_int(i), 4 * k).unwrap().value;
            let tail = e_pow(-i).scale(&by_coeffs);
            let d = (head.add(&tail).approx(4 * k) - euler(&p)).abs();
            assert!(d <= tol, "split at {i}");
        }
    }
}

fn polyexp_sum(p: &[BigRational], hi: i64) -> UCFun {
    let d = dom(0, hi);
    let pf = poly_rat(p, d.clone()).unwrap();
    let e = exp_scaled(int(-1), d).unwrap();
    product(pf.as_uc(), e.as_uc()).unwrap()
}

#[test]
fn fundamental_theorem() {
    let g = polyexp(q(1, 1), 2, rat(-1, 2), dom(0, 2)).unwrap();
    let r = check_fta(&g, &CReal::zero(), &CReal::from_int(2), 100).unwrap();
    assert!(r.check.ok, "{}", r.check);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn polynomial_integrals_exact(c0 in -5i64..5, c1 in -5i64..5, c2 in -5i64..5, k in 1u64..400) {
        let p = poly_rat(&[int(c0), int(c1), int(c2)], dom(0, 1)).unwrap();
        let r = integrate(p.as_uc(), &CReal::zero(), &CReal::one(), k).unwrap().value;
        let exact = int(c0) + rat(c1, 2) + rat(c2, 3);
        prop_assert!((r.approx(4 * k) - exact).abs() <= rat(1, k as i64) + rat(1, 4 * k as i64));
    }

    #[test]
    fn reversal_negates(a in 0i64..4, b in 0i64..4) {
        let p = polyexp(q(1, 1), 1, rat(-1, 1), dom(0, 4)).unwrap();
        let (u, v) = (CReal::from_int(a), CReal::from_int(b));
        let x = integrate(p.as_uc(), &u, &v, 100).unwrap().value.approx(400);
        let y = integrate(p.as_uc(), &v, &u, 100).unwrap().value.approx(400);
        prop_assert!((x + y).abs() <= rat(2, 100) + rat(2, 400));
    }
}
