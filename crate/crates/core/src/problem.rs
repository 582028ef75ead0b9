//! Box-constrained problem definitions and the evaluation budget.

use serde::{Deserialize, Serialize};

use crate::benchmarks::BenchmarkId;
use crate::error::{Error, Result};

/// A shifted, box-constrained minimization problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub objective: BenchmarkId,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub shift: Vec<f64>,
}

impl ProblemSpec {
    pub fn new(objective: BenchmarkId, lower: Vec<f64>, upper: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        let spec = Self {
            objective,
            lower,
            upper,
            shift,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.lower.len();
        if d == 0 {
            return Err(Error::InvalidProblem("dimension must be positive".into()));
        }
        if self.upper.len() != d || self.shift.len() != d {
            return Err(Error::InvalidProblem(format!(
                "bound/shift lengths differ: lower {}, upper {}, shift {}",
                d,
                self.upper.len(),
                self.shift.len()
            )));
        }
        for i in 0..d {
            let (lo, hi, s) = (self.lower[i], self.upper[i], self.shift[i]);
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidProblem(format!("bad bounds [{lo}, {hi}] at coordinate {i}")));
            }
            if !(s > lo && s < hi) {
                return Err(Error::InvalidProblem(format!("shift {s} not strictly inside [{lo}, {hi}] at coordinate {i}")));
            }
        }
        Ok(())
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        for (i, v) in x.iter().enumerate() {
            if !(v.is_finite() && *v >= self.lower[i] && *v <= self.upper[i]) {
                return Err(Error::OutOfDomain { index: i, value: *v });
            }
        }
        Ok(())
    }

    /// Clamp `x` into the box in place.
    pub fn clamp(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }

    /// Map a point into the unit cube.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - self.lower[i]) / self.width(i))
            .collect()
    }

    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .enumerate()
            .map(|(i, v)| self.lower[i] + v * self.width(i))
            .collect()
    }
}

/// Anything the frameworks can truly evaluate.
pub trait Objective: Sync {
    fn spec(&self) -> &ProblemSpec;
    fn evaluate(&self, x: &[f64]) -> Result<f64>;
}

/// Evaluation budget: `init` samples for the initial design, `max` in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetLedger {
    max_evaluations: usize,
    init_evaluations: usize,
    used_evaluations: usize,
}

impl BudgetLedger {
    pub fn new(max_evaluations: usize, init_evaluations: usize) -> Result<Self> {
        if init_evaluations == 0 || init_evaluations >= max_evaluations {
            return Err(Error::InvalidArgument(format!(
                "need 0 < init ({init_evaluations}) < max ({max_evaluations})"
            )));
        }
        Ok(Self {
            max_evaluations,
            init_evaluations,
            used_evaluations: 0,
        })
    }

    /// The protocol budget: `5d` total with `2d` spent on initialization.
    pub fn protocol(d: usize) -> Self {
        Self::new(5 * d, 2 * d).expect("5d > 2d > 0 for d >= 1")
    }

    pub fn max_evaluations(&self) -> usize {
        self.max_evaluations
    }

    pub fn init_evaluations(&self) -> usize {
        self.init_evaluations
    }

    pub fn used_evaluations(&self) -> usize {
        self.used_evaluations
    }

    pub fn remaining(&self) -> usize {
        self.max_evaluations - self.used_evaluations
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining() == 0
    }

    pub fn charge(&mut self) -> Result<()> {
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted {
                used: self.used_evaluations,
                max: self.max_evaluations,
            });
        }
        self.used_evaluations += 1;
        Ok(())
    }
}
