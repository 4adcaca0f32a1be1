use hmcreal::exact::{factorial, from_biguint, int, rat};
use hmcreal::fps::*;
use hmcreal::quadrature::integrate_improper_polyexp;
use hmcreal::series::exp_rational;
use hmcreal::{BigRational, CReal};
use num::Signed;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> CReal {
    CReal::from_rational(rat(n, d))
}

fn close(a: &CReal, b: &CReal, tol: &BigRational) -> bool {
    (a.approx(1 << 24) - b.approx(1 << 24)).abs() <= tol + rat(2, 1 << 24)
}

#[test]
fn cross_route_agreement() {
    let cases: Vec<Vec<CReal>> = vec![
        vec![q(1, 1)],
        vec![q(0, 1), q(1, 1)],
        vec![q(1, 2), q(-1, 1), q(1, 3)],
        vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)],
        vec![q(1, 1), q(0, 1), q(-1, 2), q(0, 1), q(1, 24)],
        vec![q(0, 1), q(1, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 120)],
    ];
    let k = 40u64;
    let tol = rat(2, k as i64);
    for p in cases {
        let newton = newton_improper_polyexp(&p, k);
        let quad = integrate_improper_polyexp(&p, k).unwrap();
        let e = euler_sum(&p);
        assert!(close(&newton, &quad, &tol), "deg {}", p.len() - 1);
        assert!(close(&newton, &e, &rat(1, k as i64)));
        assert!(close(&quad, &e, &rat(1, k as i64)));
    }
}

#[test]
fn exponential_identity() {
    for (xn, xd, yn, yd) in [(1i64, 1i64, 1i64, 1i64), (-2, 3, 1, 2), (3, 2, -1, 4)] {
        let x = rat(xn, xd);
        let y = rat(yn, yd);
        let lhs = quasi_shift(&scale_arg(&exp(), &CReal::from_rational(x.clone())), &CReal::from_rational(&y / &x));
        let ey = exp_rational(&y);
        for n in 0..10usize {
            let rhs = ey.scale(&(num::pow(x.clone(), n) / from_biguint(&factorial(n as u64))));
            assert!(close(&lhs.coeff(n), &rhs, &rat(1, 1_000_000)), "x={x} y={y} n={n}");
        }
    }
}

#[test]
fn order_additivity() {
    let polys = [
        vec![rat(0, 1), rat(0, 1), rat(3, 1)],
        vec![rat(1, 1), rat(2, 1)],
        vec![rat(0, 1), rat(-1, 2), rat(0, 1), rat(5, 1)],
        vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 7)],
    ];
    for a in &polys {
        for b in &polys {
            let f = polynomial_rat(a);
            let g = polynomial_rat(b);
            let of = order(&f, 20, 64).unwrap().unwrap();
            let og = order(&g, 20, 64).unwrap().unwrap();
            let ofg = order(&cauchy_product(&f, &g), 20, 64).unwrap().unwrap();
            assert_eq!(ofg, of + og);
        }
    }
    assert_eq!(order(&zero(), 10, 64).unwrap(), None);
}

#[test]
fn newton_matches_closed_forms() {
    // int_0^1 e^a da = e - 1
    let v = newton_integral(&exp(), &CReal::zero(), &CReal::one());
    assert!(close(&v, &exp_rational(&int(1)).sub(&CReal::one()), &rat(1, 1 << 20)));
    let p = polynomial_rat(&[rat(0, 1), rat(0, 1), rat(1, 1)]);
    let v = newton_integral(&p, &q(-1, 1), &q(2, 1));
    assert!(close(&v, &q(3, 1), &rat(1, 1 << 20)));
}

#[test]
fn growth_certificates_bound_coefficients() {
    let y = rat(3, 2);
    for f in [exp(), formal_derivative(&exp()), formal_primitive(&exp()), quasi_shift(&exp(), &q(1, 2)), cauchy_product(&exp(), &polynomial_rat(&[rat(1, 1), rat(-1, 1)]))] {
        assert!(f.spot_check(&y, 30));
    }
}

fn small_poly() -> impl Strategy<Value = Vec<BigRational>> {
    proptest::collection::vec((-9i64..9, 1i64..5).prop_map(|(n, d)| rat(n, d)), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_laws_on_truncations(a in small_poly(), b in small_poly(), c in small_poly()) {
        let (f, g, h) = (polynomial_rat(&a), scale_arg(&exp(), &q(1, 3)), polynomial_rat(&c));
        let g2 = lin_comb(&CReal::one(), &g, &CReal::one(), &polynomial_rat(&b));
        let l = cauchy_product(&cauchy_product(&f, &g2), &h);
        let r = cauchy_product(&f, &cauchy_product(&g2, &h));
        let s1 = cauchy_product(&f, &lin_comb(&CReal::one(), &g2, &CReal::one(), &h));
        let s2 = lin_comb(&CReal::one(), &cauchy_product(&f, &g2), &CReal::one(), &cauchy_product(&f, &h));
        for n in 0..12 {
            prop_assert!(close(&l.coeff(n), &r.coeff(n), &rat(1, 1_000_000)));
            prop_assert!(close(&s1.coeff(n), &s2.coeff(n), &rat(1, 1_000_000)));
        }
    }

    #[test]
    fn euler_sum_of_shift(a in small_poly(), s in 0i64..4) {
        let shifted = shift_poly_exact(&a, &int(s));
        let p: Vec<CReal> = a.iter().cloned().map(CReal::from_rational).collect();
        let ps: Vec<CReal> = shifted.iter().cloned().map(CReal::from_rational).collect();
        // int_0^inf p(a + s) e^{-a} = e^s int_s^inf p e^{-a}
        let k = 200u64;
        let whole = newton_improper_polyexp(&ps, k);
        let e = euler_sum(&ps);
        prop_assert!(close(&whole, &e, &rat(1, k as i64)));
        prop_assert!(euler_sum(&p).approx(1 << 20).abs() <= p.iter().enumerate().map(|(i, c)| c.upper_abs() * from_biguint(&factorial(i as u64))).sum::<BigRational>() + rat(1, 1000));
    }
}
