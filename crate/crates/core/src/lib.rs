//! Constructive real analysis with certified rational approximations.

pub mod creal;
pub mod error;
pub mod exact;
pub mod fps;
pub mod northeast;
pub mod quadrature;
pub mod report;
pub mod series;
pub mod transcendence;
pub mod ucfun;

pub use creal::{compare, CReal, Comparison, SeparationWitness};
pub use error::{Error, Result};
pub use report::{Check, Report};
pub use num::{BigInt, BigRational, BigUint};
