use hmcreal::creal::{compare, sqrt_rational};
use hmcreal::exact::{factorial, from_big, int, rat};
use hmcreal::series::e;
use hmcreal::transcendence::*;
use hmcreal::{BigInt, BigRational, BigUint, CReal, Comparison};
use num::{Integer, One, Signed, Zero};
use proptest::prelude::*;

fn fact(m: usize) -> BigInt {
    BigInt::from(factorial(m as u64))
}

/// `B(m)` from the definition `sum_i a_i sum_{j > i... }` via the moment
/// identity `int_0^inf a^j e^{-a} = j!` on the unshifted `p_m`, split as
/// `e^i int_i^inf p_m(a) e^{-a}`, computed by integrating by parts in exact
/// integers: `int_i^inf q(a) e^{-a} da = e^{-i} sum_j q^(j)(i)`.
fn b_oracle(a: &[i64], m: usize) -> BigInt {
    let n = a.len() - 1;
    let mut p = vec![BigInt::one()];
    let mul = |p: &[BigInt], q: &[BigInt]| {
        let mut out = vec![BigInt::zero(); p.len() + q.len() - 1];
        for (i, x) in p.iter().enumerate() {
            for (j, y) in q.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    for _ in 0..m {
        p = mul(&p, &[BigInt::zero(), BigInt::one()]);
    }
    for _ in 0..=m {
        for j in 1..=n {
            p = mul(&p, &[BigInt::from(-(j as i64)), BigInt::one()]);
        }
    }
    let mut total = BigInt::zero();
    for (i, ai) in a.iter().enumerate() {
        let x = BigInt::from(i);
        let mut d = p.clone();
        let mut s = BigInt::zero();
        while !d.is_empty() {
            s += d.iter().rev().fold(BigInt::zero(), |acc, c| acc * &x + c);
            d = d.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect();
        }
        total += BigInt::from(*ai) * s;
    }
    total
}

#[test]
fn b_is_exact_and_divisible() {
    for rel in [vec![1i64, 1], vec![-3, 1], vec![5, -2, 1], vec![-2, 0, 0, 3], vec![1, 4, -1, 2]] {
        let r = CandidateRelation::from_i64(&rel).unwrap();
        for m in 1..=6 {
            let b = compute_b(&r, m);
            assert_eq!(b, b_oracle(&rel, m), "{rel:?} m={m}");
            assert!(b.is_multiple_of(&fact(m)));
            assert_eq!(b.mod_floor(&fact(m + 1)), b_residue(&r, m).mod_floor(&fact(m + 1)));
        }
    }
}

#[test]
fn b_nonzero_when_coprime() {
    for rel in [vec![1i64, 1], vec![-3, 1], vec![5, -2, 1], vec![7, 1, 1, 1]] {
        let r = CandidateRelation::from_i64(&rel).unwrap();
        let n = rel.len() - 1;
        let guard = BigInt::from(rel[0]) * fact(n);
        for m in 1..=6 {
            if BigInt::from(m + 1).gcd(&guard).is_one() {
                assert!(compute_b(&r, m).abs() >= fact(m), "{rel:?} m={m}");
            }
        }
    }
}

fn recheck(report: &HilbertReport) {
    match report.overall {
        Verdict::Refuted { m } => {
            let row = report.rows.iter().find(|r| r.m == m).unwrap();
            let sup_a = row.a_enclosure.mag();
            let mf = from_big(fact(m));
            assert!(from_big(row.b.abs()) - sup_a >= &mf * rat(9, 10), "m={m}");
            assert!(verdict_is_sound(row));
        }
        Verdict::Inconclusive => panic!("expected a refutation"),
    }
}

#[test]
fn e_is_not_three() {
    let r = hilbert_report(&CandidateRelation::from_i64(&[-3, 1]).unwrap(), 8, Route::Newton).unwrap();
    recheck(&r);
    // independent: |e - 3| > 1/4
    assert_eq!(compare(&e().sub(&CReal::from_int(3)).abs(), &CReal::from_rational(rat(1, 4)), 1000), Comparison::Greater);
}

#[test]
fn one_plus_e_is_not_zero() {
    let rel = CandidateRelation::from_i64(&[1, 1]).unwrap();
    recheck(&hilbert_report(&rel, 8, Route::Newton).unwrap());
    recheck(&hilbert_report(&rel, 4, Route::Riemann).unwrap());
    assert_eq!(compare(&e().add(&CReal::one()), &CReal::zero(), 100), Comparison::Greater);
}

#[test]
fn coprimality_filter_skips_m() {
    // a0 = 2, n = 1: only even m + 1 ... odd m are admissible
    let rel = CandidateRelation::from_i64(&[2, 1]).unwrap();
    let r = hilbert_report(&rel, 6, Route::Newton).unwrap();
    for row in &r.rows {
        assert_eq!(row.coprime, (row.m + 1) % 2 == 1, "m={}", row.m);
        if !row.coprime {
            assert!(!row.verdict);
        }
    }
}

#[test]
fn a_routes_agree_and_bound_holds() {
    for rel in [vec![1i64, 1], vec![-3, 1], vec![1, -1, 1]] {
        let r = CandidateRelation::from_i64(&rel).unwrap();
        for m in 1..=3 {
            let k = 200;
            let a = enclose_a(&r, m, k, Route::Newton).unwrap();
            // midpoint sums for degree 2 need ~10^4 cells per integral from m = 2 on
            if r.degree() == 1 || m == 1 {
                let b = enclose_a(&r, m, k, Route::Riemann).unwrap();
                let d = (&a.lo + &a.hi - &b.lo - &b.hi).abs() / int(2);
                assert!(d <= rat(2, k as i64), "{rel:?} m={m}");
            }
            assert!(a.width() <= rat(2, k as i64));
            assert!(enclose_a(&r, m, 2 * k, Route::Newton).unwrap().width() <= a.width());
            let direct = a_via_residual(&r, m).approx(4 * k);
            assert!(a.contains(&direct) || (direct - &a.lo).abs() <= rat(1, 2 * k as i64));
            assert!(a.mag() <= from_big(a_bound(&r, m)));
        }
    }
}

#[test]
fn liouville_sqrt2() {
    let p = vec![BigInt::from(-2), BigInt::zero(), BigInt::one()];
    let r = sqrt_rational(&int(2)).unwrap();
    let y = liouville_constant(&p, &r, 1 << 20).unwrap();
    assert!(y >= rat(1, 5) && y <= int(1));
    // convergents p/q of sqrt 2 satisfy |2 q^2 - p^2| = 1, so
    // |sqrt2 - p/q| = 1 / (q^2 (sqrt2 + p/q)) > 1/(3 q^2) > y/q^2 for y <= 1/3
    let samples = convergents(&r, 10, 128);
    for s in &samples {
        let (pp, qq) = (s.numer().clone(), s.denom().clone());
        let lhs: BigInt = &qq * &qq * 2 - &pp * &pp;
        assert_eq!(lhs.abs(), BigInt::one());
    }
    let w = liouville_check(&p, &r, &y, &samples);
    assert!(w.all_pass());
    let far = liouville_check(&p, &r, &y, &[int(40), r.approx(1_000_000)]);
    assert!(far.all_pass());
}

#[test]
fn lambda_error_and_witness() {
    let l = lambda();
    for m in 1..=4u32 {
        let (k, lm) = lambda_approx(m).unwrap();
        let approx = BigRational::new(k.into(), lm.clone().into());
        let bound = BigRational::new(BigInt::one(), BigInt::from(num::pow(lm, m as usize)));
        let d = (l.approx(1 << 40) - approx).abs();
        assert!(d <= bound + rat(1, 1 << 40), "m={m}");
        assert!(lambda_error_certified(m));
    }
    assert_eq!(lambda_witness(2, &rat(1, 10)).unwrap(), 3);
    for d in 2..=5u32 {
        assert_eq!(lambda_witness(d, &int(1)).unwrap(), d + 1);
    }
    for l in 1..=3u32 {
        let (lo, hi) = lambda_tail_bounds(l);
        assert!(lo > BigRational::zero() && hi < int(1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn witness_satisfies_inequality(d in 2u32..5, num in 1u64..1000, den in 1u64..1000) {
        let y = BigRational::new(num.into(), den.into());
        if let Ok(m) = lambda_witness(d, &y) {
            let (_, l) = lambda_approx(m).unwrap();
            let lhs = BigRational::new(BigInt::one(), BigInt::from(num::pow(l, (m - d) as usize)));
            prop_assert!(m > d && lhs < y);
            if m > d + 1 {
                let (_, l0) = lambda_approx(m - 1).unwrap();
                let prev = BigRational::new(BigInt::one(), BigInt::from(num::pow(l0, (m - 1 - d) as usize)));
                prop_assert!(prev >= y);
            }
        }
    }

    #[test]
    fn pm_shape(n in 1usize..4, m in 1usize..6) {
        let p = build_pm(n, m);
        prop_assert!(p[0].is_zero());
        prop_assert_eq!(p.len() - 1, m + n * (m + 1));
        prop_assert!(p.last().unwrap().is_one());
        let _ = BigUint::one();
    }
}
