//! Shifted benchmark functions. All have optimum 0 at the shift vector.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Objective, ProblemSpec};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkId {
    Sphere,
    Griewank,
    Ackley,
    Rosenbrock,
    Rastrigin,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 5] = [
        BenchmarkId::Sphere,
        BenchmarkId::Griewank,
        BenchmarkId::Ackley,
        BenchmarkId::Rosenbrock,
        BenchmarkId::Rastrigin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkId::Sphere => "sphere",
            BenchmarkId::Griewank => "griewank",
            BenchmarkId::Ackley => "ackley",
            BenchmarkId::Rosenbrock => "rosenbrock",
            BenchmarkId::Rastrigin => "rastrigin",
        }
    }

    /// Symmetric box `[-h, h]` per coordinate.
    pub fn half_width(self) -> f64 {
        match self {
            BenchmarkId::Sphere => 100.0,
            BenchmarkId::Griewank => 600.0,
            BenchmarkId::Ackley => 32.768,
            BenchmarkId::Rosenbrock => 2.048,
            BenchmarkId::Rastrigin => 5.12,
        }
    }

    /// Unshifted base function evaluated at `z = x - o`.
    pub fn base(self, z: &[f64]) -> f64 {
        match self {
            BenchmarkId::Sphere => z.iter().map(|v| v * v).sum(),
            BenchmarkId::Griewank => {
                let sum: f64 = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                (1.0 + sum - prod).max(0.0)
            }
            BenchmarkId::Ackley => {
                let d = z.len() as f64;
                let sq = z.iter().map(|v| v * v).sum::<f64>() / d;
                let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
                (-20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E).max(0.0)
            }
            // classic form with its optimum moved from (1, .., 1) to the origin
            BenchmarkId::Rosenbrock => z
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0] + 1.0, w[1] + 1.0);
                    100.0 * (b - a * a).powi(2) + (a - 1.0).powi(2)
                })
                .sum(),
            BenchmarkId::Rastrigin => z
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                .sum(),
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchmarkId::ALL
            .into_iter()
            .find(|b| b.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// A base function with its optimum relocated to `spec.shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedObjective {
    spec: ProblemSpec,
}

impl ShiftedObjective {
    pub fn new(spec: ProblemSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec })
    }

    pub fn base(&self) -> BenchmarkId {
        self.spec.objective
    }

    pub fn shift(&self) -> &[f64] {
        &self.spec.shift
    }
}

impl Objective for ShiftedObjective {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.spec.check_point(x)?;
        let z: Vec<f64> = x.iter().zip(&self.spec.shift).map(|(a, o)| a - o).collect();
        Ok(self.spec.objective.base(&z))
    }
}

/// Build `base` in `d` dimensions with a shift drawn uniformly from the
/// central 80% of the box, deterministically from `seed`.
pub fn make_shifted(base: BenchmarkId, d: usize, seed: u64) -> Result<ShiftedObjective> {
    if d == 0 {
        return Err(Error::InvalidProblem("dimension must be positive".into()));
    }
    let h = base.half_width();
    let mut rng = SeededRng::new(seed).substream(base.name());
    let shift = (0..d).map(|_| -h + 2.0 * h * (0.1 + 0.8 * rng.uniform())).collect();
    ShiftedObjective::new(ProblemSpec::new(base, vec![-h; d], vec![h; d], shift)?)
}
