use nalgebra::{DMatrix, DVector};

use super::{check_input, sq_dist, Scaled};
use crate::database::Sample;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Cubic radial basis interpolant `sum w_i |x - c_i|^3 + a + b.x`.
#[derive(Debug, Clone)]
pub struct RbfModel {
    data: Scaled,
    weights: Vec<f64>,
    /// Constant term followed by the `d` linear coefficients.
    tail: Vec<f64>,
}

pub fn fit_rbf(samples: &[Sample], spec: &ProblemSpec) -> Result<RbfModel> {
    let points: Vec<Vec<f64>> = samples.iter().map(|s| s.point.clone()).collect();
    let values: Vec<f64> = samples.iter().map(|s| s.fitness).collect();
    RbfModel::fit(spec, &points, &values)
}

impl RbfModel {
    pub fn fit(spec: &ProblemSpec, points: &[Vec<f64>], values: &[f64]) -> Result<Self> {
        let d = spec.dimension();
        let n = points.len();
        if n < d + 1 {
            return Err(Error::DatabaseTooSmall { need: d + 1, have: n });
        }
        let data = Scaled::new(spec, points, values)?;
        let m = n + d + 1;
        let mut a = DMatrix::<f64>::zeros(m, m);
        for i in 0..n {
            for j in 0..i {
                let phi = sq_dist(&data.inputs[i], &data.inputs[j]).sqrt().powi(3);
                a[(i, j)] = phi;
                a[(j, i)] = phi;
            }
            a[(i, n)] = 1.0;
            a[(n, i)] = 1.0;
            for k in 0..d {
                a[(i, n + 1 + k)] = data.inputs[i][k];
                a[(n + 1 + k, i)] = data.inputs[i][k];
            }
        }
        let mut rhs = DVector::<f64>::zeros(m);
        rhs.rows_mut(0, n).copy_from_slice(&data.outputs);

        let sol = a.clone().lu().solve(&rhs).ok_or(Error::SingularSystem)?;
        if sol.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem);
        }
        // an LU "solution" of a numerically singular system shows up as a large residual
        let residual = (&a * &sol - &rhs).amax();
        if residual > 1e-6 * (1.0 + rhs.amax()) {
            return Err(Error::SingularSystem);
        }
        Ok(Self {
            weights: sol.rows(0, n).iter().copied().collect(),
            tail: sol.rows(n, d + 1).iter().copied().collect(),
            data,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        check_input(x, self.data.lower.len())?;
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> f64 {
        let u = self.data.unit(x);
        let radial: f64 = self
            .data
            .inputs
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| w * sq_dist(c, &u).sqrt().powi(3))
            .sum();
        let linear: f64 = self.tail[0] + self.tail[1..].iter().zip(&u).map(|(b, v)| b * v).sum::<f64>();
        self.data.y_mean + self.data.y_std * (radial + linear)
    }
}
