//! Transcendence of `e` by Hilbert's method, Liouville's inequality, and
//! Liouville's number `lambda = sum 2^(-n!)`.

pub mod hilbert;
pub mod lambda;
pub mod liouville;

pub use hilbert::{
    a_bound, a_via_residual, b_residue, build_pm, compute_b, compute_b_by_derivatives, enclose_a, hilbert_report,
    hilbert_row, verdict_is_sound, CandidateRelation, HilbertReport, HilbertRow, Route, Verdict, A_PRECISION,
};
pub use lambda::{
    lambda, lambda_approx, lambda_error_certified, lambda_rational, lambda_tail_bounds, lambda_witness, MAX_M,
};
pub use liouville::{
    bisect_root, convergents, largest_real_root, liouville_check, liouville_constant, scale_poly, LiouvilleWitness, Sample, SampleStatus,
};
