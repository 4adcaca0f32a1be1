//! Stagewise construction of a north-east function on `[0, 1] ∩ Q` whose
//! derivative is 1 everywhere but not uniformly.
//!
//! Stage `n` is a finite list of slope-one segments `a -> a + y_i` on
//! consecutive break intervals. Each segment except the first has an
//! uncolored initial part and a blue final part `(blue, right]`; blue values
//! never change again. Passing to stage `n + 1` first makes `a_{n+1}` blue,
//! then lifts a short initial piece of every segment onto the midpoint of the
//! jump to its left, halving every jump.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::sync::{Mutex, OnceLock};

use num::{BigRational, One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::enumerate::enumerate_q01_u64;
use super::qsqrt2::QSqrt2;
use crate::error::{Error, Result};
use crate::exact::{format_rational, int, rat, two_pow_neg};

/// Stages reachable by the lazy evaluator.
pub const MAX_STAGE: u64 = 8192;
/// Stages that may be materialised in full.
pub const MAX_FULL_STAGE: u64 = 18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub left: QSqrt2,
    pub right: QSqrt2,
    pub offset: QSqrt2,
    /// Start of the blue part; equal to `right` when it is empty.
    pub blue: QSqrt2,
}

impl Segment {
    pub fn uncolored(&self) -> QSqrt2 {
        &self.blue - &self.left
    }

    pub fn blue_is_empty(&self) -> bool {
        self.blue == self.right
    }

    pub fn value(&self, x: &QSqrt2) -> QSqrt2 {
        x + &self.offset
    }
}

/// Every jump of stage `n`: `1/(2^(n-1) sqrt 2) = sqrt(2)/2^n`.
pub fn jump(n: u64) -> QSqrt2 {
    QSqrt2::new(BigRational::zero(), two_pow_neg(n as u32))
}

fn stage_one() -> (Segment, Segment) {
    let s = QSqrt2::inv_sqrt2();
    let one = QSqrt2::rational(int(1));
    let first = Segment { left: QSqrt2::zero(), right: s.clone(), offset: QSqrt2::zero(), blue: QSqrt2::zero() };
    let second = Segment { left: s.clone(), right: one.clone(), offset: -s, blue: one };
    (first, second)
}

fn c_one() -> BigRational {
    let (_, second) = stage_one();
    second.uncolored().min(QSqrt2::rational(int(1))).pow2_floor()
}

/// x-length of the lifted initial piece: `min(c/2, uncolored/2)`, shrunk by
/// 3/4 if the split point would be rational.
fn split_len(seg: &Segment, c: &BigRational) -> QSqrt2 {
    let half_c = QSqrt2::rational(c / int(2));
    let mut len = half_c.min(seg.uncolored().half());
    if (&seg.left + &len).is_rational() {
        len = len.scale(&rat(3, 4));
    }
    len
}

/// Splits a non-first segment of stage `n` into the lifted piece and the rest.
fn refine(seg: &Segment, n: u64, c: &BigRational) -> (Segment, Segment) {
    let s = &seg.left + &split_len(seg, c);
    let lifted = Segment {
        left: seg.left.clone(),
        right: s.clone(),
        offset: &seg.offset + &jump(n).half(),
        blue: s.clone(),
    };
    let rest = Segment { left: s, right: seg.right.clone(), offset: seg.offset.clone(), blue: seg.blue.clone() };
    (lifted, rest)
}

/// Where `a_{n+1}` lies in stage `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepCase {
    Blue,
    /// In the uncolored part of the segment starting at `left`; its blue
    /// part is extended to start at `new_blue`.
    Uncolored { left: QSqrt2, new_blue: QSqrt2 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub n: u64,
    pub point: BigRational,
    pub case: StepCase,
}

fn is_blue_in(seg: &Segment, first: bool, x: &QSqrt2) -> bool {
    first || x > &seg.blue
}

fn decide(n: u64, seg: &Segment, first: bool, x: &BigRational) -> Step {
    let xq = QSqrt2::rational(x.clone());
    let case = if is_blue_in(seg, first, &xq) {
        StepCase::Blue
    } else {
        StepCase::Uncolored { left: seg.left.clone(), new_blue: (&xq + &seg.left).half() }
    };
    Step { n, point: x.clone(), case }
}

/// `c_{n+1}` from `c_n` and the step. Segments other than the one touched
/// by the step keep uncolored length at least `c_n`, so their two pieces are
/// at least `c_n / 2` long.
fn next_c(step: &Step, c: &BigRational) -> BigRational {
    let mut m = QSqrt2::rational(BigRational::new(1.into(), (step.n + 1).into())).min(QSqrt2::rational(c / int(2)));
    if let StepCase::Uncolored { left, new_blue } = &step.case {
        let seg = Segment { left: left.clone(), right: new_blue.clone(), offset: QSqrt2::zero(), blue: new_blue.clone() };
        let len = split_len(&seg, c);
        let rest = &seg.uncolored() - &len;
        m = m.min(len).min(rest);
    }
    m.pow2_floor()
}

/// Full stage `n`.
#[derive(Clone, Debug)]
pub struct StageFunction {
    pub n: u64,
    pub segments: Vec<Segment>,
    pub c: BigRational,
}

impl StageFunction {
    fn locate_index(&self, x: &QSqrt2) -> usize {
        let last = self.segments.len() - 1;
        self.segments.iter().position(|s| x < &s.right).unwrap_or(last)
    }

    /// Segment containing `x` and whether `x` is blue there.
    pub fn locate(&self, x: &BigRational) -> (&Segment, bool) {
        let xq = QSqrt2::rational(x.clone());
        let i = self.locate_index(&xq);
        let seg = &self.segments[i];
        (seg, is_blue_in(seg, i == 0, &xq))
    }

    pub fn value(&self, x: &BigRational) -> QSqrt2 {
        let (seg, _) = self.locate(x);
        seg.value(&QSqrt2::rational(x.clone()))
    }

    pub fn jump(&self) -> QSqrt2 {
        jump(self.n)
    }

    fn next(&self) -> StageFunction {
        let n = self.n;
        let x = enumerate_q01_u64(n + 1);
        let xq = QSqrt2::rational(x.clone());
        let i = self.locate_index(&xq);
        let mut segs = self.segments.clone();
        if !is_blue_in(&segs[i], i == 0, &xq) {
            segs[i].blue = (&xq + &segs[i].left).half();
        }
        let mut out = vec![segs[0].clone()];
        for s in &segs[1..] {
            let (a, b) = refine(s, n, &self.c);
            out.push(a);
            out.push(b);
        }
        let mut m = QSqrt2::rational(BigRational::new(1.into(), (n + 1).into()));
        for s in &out[1..] {
            m = m.min(s.uncolored());
        }
        StageFunction { n: n + 1, segments: out, c: m.pow2_floor() }
    }

    /// Named structural invariants, each decided exactly.
    pub fn check_invariants(&self) -> Vec<(&'static str, bool)> {
        let segs = &self.segments;
        let n = self.n;
        let half_sqrt = QSqrt2::inv_sqrt2();
        let count_ok = segs.len() as u64 == (1u64 << (n - 1)) + 1;
        let first = &segs[0];
        let first_ok = first.left == QSqrt2::zero() && first.right == half_sqrt && first.offset == QSqrt2::zero();
        let breaks_ok = segs.windows(2).all(|w| w[0].right == w[1].left)
            && segs.iter().all(|s| s.left < s.right)
            && segs.last().unwrap().right == QSqrt2::rational(int(1))
            && segs[1..].iter().all(|s| !s.left.is_rational());
        let j = self.jump();
        let jumps_ok = segs.windows(2).all(|w| &w[0].offset - &w[1].offset == j);
        let c = QSqrt2::rational(self.c.clone());
        let uncolored_ok = self.c.is_positive()
            && segs[1..].iter().all(|s| s.uncolored() >= c && s.blue <= s.right);
        let c_ok = self.c <= BigRational::new(1.into(), n.into());
        let below_ok = segs[1..].iter().all(|s| s.value(&s.right) < half_sqrt);
        let enumerated_blue = (1..=n).all(|m| self.locate(&enumerate_q01_u64(m)).1);
        vec![
            ("segment_count", count_ok),
            ("first_segment_identity", first_ok),
            ("breaks_increasing_irrational", breaks_ok),
            ("jumps_equal", jumps_ok),
            ("uncolored_at_least_c", uncolored_ok),
            ("c_at_most_1_over_n", c_ok),
            ("values_below_inv_sqrt2", below_ok),
            ("enumerated_points_blue", enumerated_blue),
        ]
    }

    /// Blue parts of `self` are blue, with the same offsets, in `next`.
    pub fn refined_by(&self, next: &StageFunction) -> bool {
        let mut blues: Vec<(&Segment, bool)> = vec![(&self.segments[0], true)];
        blues.extend(self.segments[1..].iter().filter(|s| !s.blue_is_empty()).map(|s| (s, false)));
        blues.iter().all(|(s, first)| {
            next.segments.iter().enumerate().any(|(i, t)| {
                let start_ok = if *first { i == 0 } else { i > 0 && t.left <= s.blue && t.blue <= s.blue };
                start_ok && t.right == s.right && t.offset == s.offset
            })
        })
    }

    /// One line per segment: `i left right offset blue`, blue `-` when empty.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "stage {} segments {} c {}", self.n, self.segments.len(), format_rational(&self.c)).unwrap();
        for (i, s) in self.segments.iter().enumerate() {
            let blue = if s.blue_is_empty() { "-".to_string() } else { s.blue.to_string() };
            writeln!(out, "{}\t{}\t{}\t{}\t{}", i + 1, s.left, s.right, s.offset, blue).unwrap();
        }
        out
    }
}

/// Stage `n` in full.
pub fn build_stage(n: u64) -> Result<StageFunction> {
    if n == 0 {
        return Err(Error::Precondition("stages start at 1".into()));
    }
    if n > MAX_FULL_STAGE {
        return Err(Error::Resource(format!("stage {n} has 2^{} + 1 segments", n - 1)));
    }
    let (a, b) = stage_one();
    let mut st = StageFunction { n: 1, segments: vec![a, b], c: c_one() };
    while st.n < n {
        st = st.next();
    }
    Ok(st)
}

/// The segment holding one point, followed through the stages. Lengths are
/// kept relative to the point: `d = x - left`, `blue - x`, `right - x`.
#[derive(Clone, Debug)]
struct Tracker {
    x: QSqrt2,
    n: u64,
    first: bool,
    d: QSqrt2,
    blue_rel: QSqrt2,
    right_rel: QSqrt2,
    offset: QSqrt2,
}

impl Tracker {
    fn start(x: &BigRational) -> Tracker {
        let xq = QSqrt2::rational(x.clone());
        let (a, b) = stage_one();
        let first = xq < a.right;
        let seg = if first { a } else { b };
        Tracker {
            d: &xq - &seg.left,
            blue_rel: &seg.blue - &xq,
            right_rel: &seg.right - &xq,
            offset: seg.offset,
            x: xq,
            n: 1,
            first,
        }
    }

    fn segment(&self) -> Segment {
        Segment {
            left: &self.x - &self.d,
            right: &self.x + &self.right_rel,
            offset: self.offset.clone(),
            blue: &self.x + &self.blue_rel,
        }
    }

    fn is_blue(&self) -> bool {
        self.first || self.blue_rel.signum() == Ordering::Less
    }

    fn lift(&mut self, len_past_x: QSqrt2) {
        self.blue_rel = len_past_x.clone();
        self.right_rel = len_past_x;
        // offset + sqrt(2)/2^(n+1)
        let q = -sub_pow2(&-self.offset.q.clone(), self.n as u32 + 1);
        self.offset = QSqrt2::new(self.offset.p.clone(), q);
    }

    fn advance(&mut self, step: &Step, c: &BigRational) {
        debug_assert_eq!(step.n, self.n);
        if !self.first {
            let touched = match &step.case {
                StepCase::Uncolored { left, new_blue } if left.q == -self.d.q.clone() && *left == &self.x - &self.d => {
                    self.blue_rel = new_blue - &self.x;
                    true
                }
                _ => false,
            };
            if touched {
                let seg = self.segment();
                let s = &seg.left + &split_len(&seg, c);
                let past = &s - &self.x;
                if past.signum() == Ordering::Greater {
                    self.lift(past);
                } else {
                    self.d = -past;
                }
            } else {
                // an untouched segment has uncolored length >= c, so it splits at c/2
                let u = QSqrt2::new(sub_pow2(&self.d.p, c.denom().bits() as u32), self.d.q.clone());
                if u.signum() == Ordering::Less {
                    self.lift(-u);
                } else {
                    self.d = u;
                }
            }
        }
        self.n += 1;
    }
}

/// `q - 2^-j` for reduced `q`. Odd factors of the denominator stay coprime
/// to the numerator, so only powers of two need cancelling.
fn sub_pow2(q: &BigRational, j: u32) -> BigRational {
    let e = q.denom().trailing_zeros().unwrap_or(0) as u32;
    let odd = q.denom() >> e;
    let (num, den) = if j <= e {
        (q.numer() - (&odd << (e - j)), q.denom().clone())
    } else {
        ((q.numer() << (j - e)) - &odd, odd << j)
    };
    if num.is_zero() {
        return BigRational::zero();
    }
    let z = num.trailing_zeros().unwrap_or(0).min(den.trailing_zeros().unwrap_or(0));
    BigRational::new_raw(num >> z, den >> z)
}

#[derive(Default)]
struct Ledger {
    /// `c[n - 1] = c_n`.
    c: Vec<BigRational>,
    /// `steps[n - 1]` takes stage `n` to `n + 1`.
    steps: Vec<Step>,
}

/// Step decisions, computed once and shared by every evaluation.
pub struct Construction {
    ledger: Mutex<Ledger>,
}

impl Construction {
    pub fn new() -> Construction {
        Construction { ledger: Mutex::new(Ledger { c: vec![c_one()], steps: Vec::new() }) }
    }

    /// The process-wide instance.
    pub fn global() -> &'static Construction {
        static G: OnceLock<Construction> = OnceLock::new();
        G.get_or_init(Construction::new)
    }

    fn ensure(&self, n: u64) -> Result<()> {
        if n > MAX_STAGE {
            return Err(Error::Resource(format!("stage {n} exceeds {MAX_STAGE}")));
        }
        let mut l = self.ledger.lock().unwrap();
        while (l.steps.len() as u64) < n {
            let t = l.steps.len() as u64 + 1;
            let x = enumerate_q01_u64(t + 1);
            let mut tr = Tracker::start(&x);
            for s in 1..t {
                tr.advance(&l.steps[s as usize - 1], &l.c[s as usize - 1]);
            }
            let step = decide(t, &tr.segment(), tr.first, &x);
            let c = next_c(&step, &l.c[t as usize - 1]);
            l.steps.push(step);
            l.c.push(c);
        }
        Ok(())
    }

    /// `c_n`.
    pub fn c(&self, n: u64) -> Result<BigRational> {
        self.ensure(n)?;
        Ok(self.ledger.lock().unwrap().c[n as usize - 1].clone())
    }

    /// The step from stage `n` to `n + 1`.
    pub fn step(&self, n: u64) -> Result<Step> {
        self.ensure(n)?;
        Ok(self.ledger.lock().unwrap().steps[n as usize - 1].clone())
    }

    fn stage_data(&self, n: u64) -> Result<(Step, BigRational)> {
        self.ensure(n)?;
        let l = self.ledger.lock().unwrap();
        Ok((l.steps[n as usize - 1].clone(), l.c[n as usize - 1].clone()))
    }

    /// Segment of stage `n` containing `a`.
    pub fn segment_at(&self, a: &BigRational, n: u64) -> Result<(Segment, bool)> {
        let mut tr = Tracker::start(a);
        while tr.n < n {
            let (step, c) = self.stage_data(tr.n)?;
            tr.advance(&step, &c);
        }
        let blue = tr.is_blue();
        Ok((tr.segment(), blue))
    }

    /// First stage at which `a` is blue, with its segment there. The scan
    /// ends by the enumeration index of `a`; past `MAX_STAGE` it is a
    /// resource error.
    pub fn blue_segment(&self, a: &BigRational) -> Result<BlueSegment> {
        check_unit(a)?;
        let mut tr = Tracker::start(a);
        loop {
            if tr.is_blue() {
                return Ok(BlueSegment { stage: tr.n, segment: tr.segment(), first: tr.first });
            }
            let (step, c) = self.stage_data(tr.n)?;
            tr.advance(&step, &c);
        }
    }

    pub fn eval(&self, a: &BigRational) -> Result<QSqrt2> {
        let b = self.blue_segment(a)?;
        Ok(b.segment.value(&QSqrt2::rational(a.clone())))
    }
}

impl Default for Construction {
    fn default() -> Self {
        Construction::new()
    }
}

fn check_unit(a: &BigRational) -> Result<()> {
    if a.is_negative() || *a > BigRational::one() {
        return Err(Error::Domain(format!("{} is outside [0, 1]", format_rational(a))));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct BlueSegment {
    pub stage: u64,
    pub segment: Segment,
    pub first: bool,
}

impl BlueSegment {
    /// Blue interval `(lo, hi)` around the point, with the closed ends of
    /// `[0, 1]` kept.
    pub fn blue_interval(&self) -> (QSqrt2, QSqrt2) {
        let lo = if self.first { self.segment.left.clone() } else { self.segment.blue.clone() };
        (lo, self.segment.right.clone())
    }
}

/// `f(a)`.
pub fn eval_f(a: &BigRational) -> Result<QSqrt2> {
    Construction::global().eval(a)
}

/// Smallest `n >= 2k` with `1/(2^(n-1) sqrt 2) <= 1/(2k)`.
pub fn uc_stage(k: u64) -> u64 {
    let target = QSqrt2::rational(BigRational::new(1.into(), (2 * k).into()));
    let mut n = (2 * k).max(1);
    while jump(n) > target {
        n += 1;
    }
    n
}

#[derive(Clone, Debug)]
pub struct UcPair {
    pub a: BigRational,
    pub b: BigRational,
    pub diff: QSqrt2,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct UcReport {
    pub k: u64,
    pub n: u64,
    pub c_n: BigRational,
    pub pairs: Vec<UcPair>,
}

impl UcReport {
    pub fn all_ok(&self) -> bool {
        self.pairs.iter().all(|p| p.ok)
    }
}

/// Points sampled by the uniform-continuity check: `a_1, ..., a_pool`.
pub const UC_POOL: u64 = 600;

/// Random pairs `|a - b| <= c_n` from the enumerated pool must satisfy
/// `|f(a) - f(b)| <= 1/k`.
pub fn verify_uc_estimate(k: u64, trials: usize, seed: u64) -> Result<UcReport> {
    if k == 0 {
        return Err(Error::Precondition("k >= 1".into()));
    }
    let con = Construction::global();
    let n = uc_stage(k);
    let c_n = con.c(n)?;
    let mut pool: Vec<BigRational> = (1..=UC_POOL).map(enumerate_q01_u64).collect();
    pool.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = QSqrt2::rational(BigRational::new(1.into(), k.into()));
    let mut pairs = Vec::with_capacity(trials);
    let mut attempts = 0usize;
    while pairs.len() < trials {
        attempts += 1;
        if attempts > 1000 * trials.max(1) {
            return Err(Error::Resource("no close pairs in the sample pool".into()));
        }
        let i = rng.gen_range(0..pool.len());
        let near: Vec<&BigRational> =
            pool.iter().filter(|b| **b != pool[i] && (*b - &pool[i]).abs() <= c_n).collect();
        let Some(b) = near.choose(&mut rng) else { continue };
        let a = pool[i].clone();
        let b = (*b).clone();
        let diff = (&con.eval(&a)? - &con.eval(&b)?).abs();
        let ok = diff <= tol;
        pairs.push(UcPair { a, b, diff, ok });
    }
    Ok(UcReport { k, n, c_n, pairs })
}

/// `(f(b) - f(a)) / (b - a)`.
pub fn difference_quotient(a: &BigRational, b: &BigRational) -> Result<QSqrt2> {
    if a == b {
        return Err(Error::DivisionByZero);
    }
    let d = &eval_f(b)? - &eval_f(a)?;
    Ok(d.scale(&(b - a).recip()))
}

/// Points `a +- j h / (k + 1)`, `j = 1..=k`, on each side of `a` where the
/// blue interval reaches at least `h`, with the difference quotient there.
pub fn slope_samples(a: &BigRational, k: u64) -> Result<Vec<(BigRational, QSqrt2)>> {
    let blue = Construction::global().blue_segment(a)?;
    let (lo, hi) = blue.blue_interval();
    let x = QSqrt2::rational(a.clone());
    let mut out = Vec::new();
    for (width, sign) in [(&hi - &x, 1i64), (&x - &lo, -1i64)] {
        if width.signum() != Ordering::Greater {
            continue;
        }
        let h = width.pow2_floor() / int(2);
        for j in 1..=k {
            let b = a + &h * BigRational::new(j.into(), (k + 1).into()) * int(sign);
            let q = difference_quotient(a, &b)?;
            out.push((b, q));
        }
    }
    Ok(out)
}

pub fn verify_slope_one(a: &BigRational, k: u64) -> Result<bool> {
    let s = slope_samples(a, k)?;
    let one = QSqrt2::rational(int(1));
    Ok(!s.is_empty() && s.iter().all(|(_, q)| *q == one))
}

#[derive(Clone, Debug)]
pub struct GapReport {
    pub count: u64,
    /// Every sampled `a > 1/sqrt 2` has `f(a) < 1/sqrt 2`.
    pub all_below: bool,
    /// Largest sampled value of `f`.
    pub sup: QSqrt2,
    /// Largest sampled point below `1/sqrt 2`.
    pub best_left: BigRational,
}

/// Evaluates `f` on `a_1, ..., a_count`.
pub fn gap_check(count: u64) -> Result<GapReport> {
    let s = QSqrt2::inv_sqrt2();
    let mut all_below = true;
    let mut sup = QSqrt2::zero();
    let mut best_left = BigRational::zero();
    for j in 1..=count {
        let a = enumerate_q01_u64(j);
        let v = eval_f(&a)?;
        let aq = QSqrt2::rational(a.clone());
        if aq > s && v >= s {
            all_below = false;
        }
        if aq < s && a > best_left {
            best_left = a.clone();
        }
        if v > sup {
            sup = v;
        }
    }
    Ok(GapReport { count, all_below, sup, best_left })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_one_shape() {
        let f1 = build_stage(1).unwrap();
        assert_eq!(f1.segments.len(), 2);
        assert_eq!(&f1.segments[0].offset - &f1.segments[1].offset, QSqrt2::inv_sqrt2());
        assert_eq!(f1.c, rat(1, 4));
    }

    #[test]
    fn invariants_small_stages() {
        for n in 1..=8 {
            let st = build_stage(n).unwrap();
            for (name, ok) in st.check_invariants() {
                assert!(ok, "stage {n}: {name}");
            }
        }
    }

    #[test]
    fn lazy_matches_full() {
        let con = Construction::new();
        let st = build_stage(7).unwrap();
        for n in 1..=7 {
            assert_eq!(con.c(n).unwrap(), build_stage(n).unwrap().c);
        }
        for j in 1..=60 {
            let a = enumerate_q01_u64(j);
            let (seg, blue) = con.segment_at(&a, 7).unwrap();
            let (full, full_blue) = st.locate(&a);
            assert_eq!(&seg, full);
            assert_eq!(blue, full_blue);
        }
    }

    #[test]
    fn values() {
        assert_eq!(eval_f(&rat(1, 2)).unwrap(), QSqrt2::rational(rat(1, 2)));
        let v = eval_f(&rat(1, 1)).unwrap();
        assert!(v < QSqrt2::inv_sqrt2());
        assert!(eval_f(&rat(3, 2)).is_err());
        assert!(verify_slope_one(&rat(1, 2), 4).unwrap());
        let q = difference_quotient(&rat(1, 2), &rat(3, 4)).unwrap();
        assert_ne!(q, QSqrt2::rational(int(1)));
    }

    #[test]
    fn dyadic_subtraction() {
        for (n, d) in [(3i64, 7i64), (5, 12), (-1, 8), (1, 4), (9, 1), (0, 1)] {
            for j in 0..6 {
                let q = rat(n, d);
                let r = sub_pow2(&q, j);
                assert_eq!(r, &q - two_pow_neg(j));
                assert_eq!(r, BigRational::new(r.numer().clone(), r.denom().clone()));
            }
        }
    }

    #[test]
    fn uc_stage_choice() {
        assert_eq!(uc_stage(1), 2);
        assert_eq!(uc_stage(3), 6);
    }
}
