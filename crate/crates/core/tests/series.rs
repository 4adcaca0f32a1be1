use hmcreal::exact::rat;
use hmcreal::series::{cauchy_product, exp_series, geometric, sum};
use hmcreal::{BigRational, CReal};
use num::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const K: u64 = 1 << 16;

fn ratq(n: i64, d: i64) -> CReal {
    CReal::from_rational(rat(n, d))
}

#[test]
fn exp_near_zero_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tol = rat(1, K as i64);
    for _ in 0..200 {
        let a = rat(rng.gen_range(-1000..=1000), 2000);
        let s = sum(&exp_series(&CReal::from_rational(a.clone()))).approx(K);
        let one = rat(1, 1);
        assert!((&s - &one).abs() <= a.abs() * rat(2, 1) + &tol, "a={a}");
        assert!((&s - &one - &a).abs() <= &a * &a + &tol, "a={a}");
    }
}

#[test]
fn exp_is_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let a = rat(rng.gen_range(-500..=500), 100);
        let v = sum(&exp_series(&CReal::from_rational(a.clone())));
        let w = v.require_witness(24).expect("e^a is apart from zero");
        let k = w.k().clone();
        assert!(v.approx_big(&(k * 4u32)).is_positive(), "a={a}");
    }
}

#[test]
fn cauchy_product_matches_convolution() {
    let s = exp_series(&ratq(1, 3));
    let t = geometric(&ratq(-2, 5), 0).unwrap();
    let p = cauchy_product(&s, &t);
    let xs = s.coeffs(50);
    let ys = t.coeffs(50);
    for n in 0..50 {
        let brute = (0..=n).map(|i| xs[i].mul(&ys[n - i])).fold(CReal::zero(), |a, b| a.add(&b));
        let d = p.coeff(n).sub(&brute).approx(10_000_000).abs();
        assert!(d <= rat(1, 1_000_000), "n={n}");
    }
}

#[test]
fn product_of_sums() {
    let s = exp_series(&ratq(1, 2));
    let t = exp_series(&ratq(-1, 3));
    let lhs = sum(&cauchy_product(&s, &t));
    let rhs = sum(&exp_series(&ratq(1, 6)));
    assert!((lhs.approx(K) - rhs.approx(K)).abs() <= rat(2, K as i64));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn infinite_triangle_inequality(n in -9i64..=9, d in 10i64..20, k in 1u64..5000) {
        let x = rat(n, d);
        let signed = sum(&geometric(&CReal::from_rational(x.clone()), 1).unwrap()).approx(k);
        let absolute = sum(&geometric(&CReal::from_rational(x.abs()), 1).unwrap()).approx(k);
        prop_assert!(signed.abs() <= absolute + BigRational::new(2.into(), k.into()));
        let e_signed = sum(&exp_series(&CReal::from_rational(-x.abs() * rat(5, 1)))).approx(k);
        let e_abs = sum(&exp_series(&CReal::from_rational(x.abs() * rat(5, 1)))).approx(k);
        prop_assert!(e_signed.abs() <= e_abs + BigRational::new(2.into(), k.into()));
    }

    #[test]
    fn finite_series_sum_exact(v in proptest::collection::vec(-100i64..100, 1..12)) {
        let xs: Vec<CReal> = v.iter().map(|&n| ratq(n, 7)).collect();
        let total: BigRational = v.iter().map(|&n| rat(n, 7)).fold(BigRational::zero(), |a, b| a + b);
        let s = sum(&hmcreal::series::ConvSeries::finite(xs)).approx(1 << 20);
        prop_assert!((s - total).abs() <= rat(1, 1 << 20));
    }
}
