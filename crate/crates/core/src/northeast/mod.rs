//! A north-east function on the rationals of `[0, 1]`: differentiable with
//! derivative 1 everywhere, uniformly continuous, yet with a jump at `1/sqrt 2`
//! and no uniform derivative.

pub mod construction;
pub mod enumerate;
pub mod qsqrt2;

pub use construction::{
    build_stage, difference_quotient, eval_f, gap_check, jump, slope_samples, uc_stage, verify_slope_one,
    verify_uc_estimate, BlueSegment, Construction, GapReport, Segment, StageFunction, Step, StepCase, UcPair,
    UcReport,
};
pub use enumerate::{calkin_wilf, calkin_wilf_index, enumerate_q01, enumerate_q01_u64, index_q01};
pub use qsqrt2::QSqrt2;
