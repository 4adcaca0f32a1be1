//! Exact arithmetic in `Q(sqrt 2)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, Signed, Zero};

use crate::creal::{sqrt_rational, CReal};
use crate::exact::{format_rational, int, rat, two_pow_neg};

/// `p + q sqrt(2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    pub p: BigRational,
    pub q: BigRational,
}

impl QSqrt2 {
    pub fn new(p: BigRational, q: BigRational) -> QSqrt2 {
        QSqrt2 { p, q }
    }

    pub fn rational(p: BigRational) -> QSqrt2 {
        QSqrt2 { p, q: BigRational::zero() }
    }

    pub fn zero() -> QSqrt2 {
        QSqrt2::rational(BigRational::zero())
    }

    /// `1/sqrt(2) = sqrt(2)/2`.
    pub fn inv_sqrt2() -> QSqrt2 {
        QSqrt2::new(BigRational::zero(), rat(1, 2))
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn scale(&self, r: &BigRational) -> QSqrt2 {
        QSqrt2::new(&self.p * r, &self.q * r)
    }

    pub fn half(&self) -> QSqrt2 {
        self.scale(&rat(1, 2))
    }

    /// Sign of `p + q sqrt 2`, decided by comparing `p^2` with `2 q^2`
    /// after clearing denominators.
    pub fn signum(&self) -> Ordering {
        let zero = BigInt::zero();
        let a = self.p.numer() * self.q.denom();
        let c = self.q.numer() * self.p.denom();
        match (a.cmp(&zero), c.cmp(&zero)) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            (x, _) => match (&a * &a).cmp(&(&c * &c * 2u32)) {
                Ordering::Greater => x,
                Ordering::Less => x.reverse(),
                Ordering::Equal => Ordering::Equal,
            },
        }
    }

    pub fn abs(&self) -> QSqrt2 {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(self, o: QSqrt2) -> QSqrt2 {
        if o < self {
            o
        } else {
            self
        }
    }

    pub fn to_creal(&self) -> CReal {
        let s = sqrt_rational(&int(2)).expect("2 > 0");
        CReal::from_rational(self.p.clone()).add(&s.scale(&self.q))
    }

    /// Largest `2^-j`, `j >= 0`, not above a positive value.
    pub fn pow2_floor(&self) -> BigRational {
        assert_eq!(self.signum(), Ordering::Greater, "pow2_floor of a non-positive value");
        let fits = |j: u32| QSqrt2::rational(two_pow_neg(j)) <= *self;
        let mut hi = 1u32;
        while !fits(hi) {
            hi *= 2;
        }
        // fits(hi) holds; find the least such j
        let mut lo = 0u32;
        if fits(0) {
            return two_pow_neg(0);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        two_pow_neg(hi)
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, o: &QSqrt2) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, o: &QSqrt2) -> Ordering {
        (self - o).signum()
    }
}

impl Add for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.p + &o.p, &self.q + &o.q)
    }
}

impl Sub for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.p - &o.p, &self.q - &o.q)
    }
}

impl Mul for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.p * &o.p + &self.q * &o.q * int(2), &self.p * &o.q + &self.q * &o.p)
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.p, -self.q)
    }
}

impl From<BigRational> for QSqrt2 {
    fn from(p: BigRational) -> QSqrt2 {
        QSqrt2::rational(p)
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_negative() {
            write!(f, "{} - {}*sqrt2", format_rational(&self.p), format_rational(&-self.q.clone()))
        } else {
            write!(f, "{} + {}*sqrt2", format_rational(&self.p), format_rational(&self.q))
        }
    }
}
