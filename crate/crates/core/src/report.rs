//! Residual reports for identity checks.

use std::fmt;

use num::{BigRational, Signed, Zero};

use crate::creal::CReal;
use crate::exact::format_rational;

/// One identity or inequality, with the measured residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: BigRational,
    pub tolerance: BigRational,
    pub ok: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: BigRational, tolerance: BigRational) -> Check {
        let ok = residual <= tolerance;
        Check { name: name.into(), residual, tolerance, ok }
    }

    /// `|lhs - rhs|`, measured at precision `4 / tolerance`.
    pub fn identity(name: impl Into<String>, lhs: &CReal, rhs: &CReal, tolerance: BigRational) -> Check {
        let r = lhs.sub(rhs).approx_big(&measure_k(&tolerance)).abs();
        Check::new(name, r, tolerance)
    }

    /// `max(0, lhs - rhs)` for a claimed `lhs <= rhs`.
    pub fn at_most(name: impl Into<String>, lhs: &CReal, rhs: &CReal, tolerance: BigRational) -> Check {
        let r = lhs.sub(rhs).approx_big(&measure_k(&tolerance));
        let r = if r.is_negative() { BigRational::zero() } else { r };
        Check::new(name, r, tolerance)
    }
}

fn measure_k(tol: &BigRational) -> num::BigUint {
    crate::exact::ceil_pos(&(tol.recip() * BigRational::from_integer(12.into())))
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} residual={} tol={}",
            if self.ok { "ok  " } else { "FAIL" },
            self.name,
            format_rational(&self.residual),
            format_rational(&self.tolerance)
        )
    }
}

/// List of checks; passes when every entry does.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
