use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::expr::PotentialExpr;

/// `-y'' + q(x) y = mu^2 y` on (0, pi) with `y'(0) = 0 = y(pi)` and the
/// transmission conditions `y(d+0) = a y(d-0)`, `y'(d+0) = y'(d-0) / a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub potential: PotentialExpr,
    pub a: f64,
    pub d: f64,
    pub label: String,
}

impl Problem {
    pub fn new(potential: PotentialExpr, a: f64, d: f64) -> Result<Self> {
        let p = Self {
            label: potential.source().to_string(),
            potential,
            a,
            d,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn parse(q_source: &str, a: f64, d: f64) -> Result<Self> {
        Self::new(PotentialExpr::parse(q_source)?, a, d)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "a must be positive, got {}",
                self.a
            )));
        }
        if !(self.d > 0.0 && self.d < PI) {
            return Err(Error::InvalidProblem(format!(
                "d must lie in (0, pi), got {}",
                self.d
            )));
        }
        Ok(())
    }

    /// `a == 1` removes the discontinuity; the solver still works but the
    /// problem is then a classical one.
    pub fn is_continuous(&self) -> bool {
        self.a == 1.0
    }
}
