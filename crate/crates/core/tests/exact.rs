use hmcreal::exact::{binomial, factorial, format_rational, parse_rational, rat};
use num::{BigInt, BigRational, BigUint, Integer, One, Signed, Zero};
use proptest::prelude::*;

fn canonical(q: &BigRational) -> bool {
    q.denom().is_positive() && q.numer().gcd(q.denom()).is_one()
}

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #[test]
    fn field_axioms(a in small_rat(), b in small_rat(), c in small_rat()) {
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        if !a.is_zero() {
            prop_assert!((&a * a.recip()).is_one());
        }
        for r in [&a + &b, &a - &c, &a * &b] {
            prop_assert!(canonical(&r));
        }
        if !b.is_zero() {
            prop_assert!(canonical(&(&a / &b)));
        }
    }

    #[test]
    fn format_parse_round_trip(a in small_rat()) {
        prop_assert_eq!(parse_rational(&format_rational(&a)).unwrap(), a);
    }
}

#[test]
fn pascal_identity() {
    for m in 1..=30u64 {
        for n in 1..=m {
            assert_eq!(binomial(m, n), binomial(m - 1, n - 1) + binomial(m - 1, n), "({m}, {n})");
        }
    }
}

#[test]
fn factorial_values() {
    assert_eq!(factorial(0), BigUint::one());
    assert_eq!(factorial(20), BigUint::from(2_432_902_008_176_640_000u64));
    let f30 = factorial(30);
    assert_eq!(f30.to_string(), "265252859812191058636308480000000");
    assert_eq!(BigInt::from(f30) % BigInt::from(1u64 << 26), BigInt::zero());
}

#[test]
fn parse_rejects_garbage() {
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("abc").is_err());
    assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
}
