//! Cheap models fit to the evaluated archive.
//!
//! Both model families work in the unit cube with standardized outputs; the
//! public prediction API takes and returns original units.

mod gp;
mod rbf;

pub use gp::{fit_gp, lcb, length_scale_grid, signal_variance_grid, GpHyper, GpModel, NUGGET_MAX, NUGGET_MIN};
pub use rbf::{fit_rbf, RbfModel};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Training data mapped to the unit cube, outputs standardized.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Scaled {
    pub lower: Vec<f64>,
    pub width: Vec<f64>,
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<f64>,
    pub y_mean: f64,
    pub y_std: f64,
}

impl Scaled {
    pub fn new(spec: &ProblemSpec, points: &[Vec<f64>], values: &[f64]) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::Mismatch(format!("{} points but {} values", points.len(), values.len())));
        }
        let d = spec.dimension();
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: p.len() });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFitness(*v));
        }
        let n = values.len() as f64;
        let y_mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n;
        let y_std = if var > 0.0 { var.sqrt() } else { 1.0 };
        Ok(Self {
            lower: spec.lower.clone(),
            width: (0..d).map(|i| spec.width(i)).collect(),
            inputs: points.iter().map(|p| spec.to_unit(p)).collect(),
            outputs: values.iter().map(|v| (v - y_mean) / y_std).collect(),
            y_mean,
            y_std,
        })
    }

    pub fn unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.width))
            .map(|(v, (lo, w))| (v - lo) / w)
            .collect()
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn check_input(x: &[f64], d: usize) -> Result<()> {
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::OutOfDomain { index: i, value: *v });
    }
    Ok(())
}
