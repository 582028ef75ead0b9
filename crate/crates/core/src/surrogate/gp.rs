use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{check_input, sq_dist, Scaled};
use crate::database::Sample;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

pub const NUGGET_MIN: f64 = 1e-8;
pub const NUGGET_MAX: f64 = 1e-2;

pub const LENGTH_SCALE_COUNT: usize = 16;
pub const SIGNAL_VARIANCE_COUNT: usize = 8;

/// Candidate length-scales in unit-cube coordinates, `sqrt(d) * 10^[-1.5, 0.5]`.
pub fn length_scale_grid(d: usize) -> Vec<f64> {
    let root_d = (d as f64).sqrt();
    log_grid(LENGTH_SCALE_COUNT, -1.5, 0.5).into_iter().map(|l| l * root_d).collect()
}

/// Candidate signal variances in standardized units, `10^[-1, 1]`.
pub fn signal_variance_grid() -> Vec<f64> {
    log_grid(SIGNAL_VARIANCE_COUNT, -1.0, 1.0)
}

fn log_grid(n: usize, lo_exp: f64, hi_exp: f64) -> Vec<f64> {
    (0..n)
        .map(|i| 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / (n - 1) as f64))
        .collect()
}

/// Squared-exponential kernel hyperparameters in scaled space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpHyper {
    /// Isotropic length-scale in unit-cube coordinates.
    pub length_scale: f64,
    /// Signal variance in standardized output units.
    pub signal_variance: f64,
}

/// Kriging model with squared-exponential kernel.
#[derive(Debug, Clone)]
pub struct GpModel {
    data: Scaled,
    hyper: GpHyper,
    nugget: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    log_marginal_likelihood: f64,
}

/// Fit by grid search over 16 length-scales x 8 signal variances on the log
/// marginal likelihood.
pub fn fit_gp(samples: &[Sample], spec: &ProblemSpec) -> Result<GpModel> {
    let points: Vec<Vec<f64>> = samples.iter().map(|s| s.point.clone()).collect();
    let values: Vec<f64> = samples.iter().map(|s| s.fitness).collect();
    GpModel::fit(spec, &points, &values)
}

impl GpModel {
    pub fn fit(spec: &ProblemSpec, points: &[Vec<f64>], values: &[f64]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::DatabaseTooSmall { need: 2, have: points.len() });
        }
        let data = Scaled::new(spec, points, values)?;
        let variances = signal_variance_grid();

        let mut best: Option<GpModel> = None;
        let mut last_err = None;
        for ls in length_scale_grid(spec.dimension()) {
            let corr = correlation(&data.inputs, ls);
            for &sv in &variances {
                let hyper = GpHyper {
                    length_scale: ls,
                    signal_variance: sv,
                };
                match Self::factor(&data, &corr, hyper) {
                    Ok(m) => {
                        if best.as_ref().is_none_or(|b| m.log_marginal_likelihood > b.log_marginal_likelihood) {
                            best = Some(m);
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
        }
        let best = best.ok_or_else(|| last_err.unwrap_or(Error::IllConditioned { nugget: NUGGET_MAX }))?;
        let corr = correlation(&best.data.inputs, best.hyper.length_scale);
        Ok(best.refined(&corr))
    }

    /// Fit with fixed hyperparameters (no grid search).
    pub fn fit_with(spec: &ProblemSpec, points: &[Vec<f64>], values: &[f64], hyper: GpHyper) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::DatabaseTooSmall { need: 2, have: points.len() });
        }
        if !(hyper.length_scale > 0.0 && hyper.signal_variance > 0.0) {
            return Err(Error::InvalidArgument(format!("bad hyperparameters {hyper:?}")));
        }
        let data = Scaled::new(spec, points, values)?;
        let corr = correlation(&data.inputs, hyper.length_scale);
        Ok(Self::factor(&data, &corr, hyper)?.refined(&corr))
    }

    fn refined(mut self, corr: &DMatrix<f64>) -> Self {
        let y = DVector::from_column_slice(&self.data.outputs);
        self.alpha = refine_weights(&self.chol, corr, self.hyper.signal_variance, &y);
        self
    }

    fn factor(data: &Scaled, corr: &DMatrix<f64>, hyper: GpHyper) -> Result<Self> {
        let n = data.inputs.len();
        let y = DVector::from_column_slice(&data.outputs);
        let mut nugget = NUGGET_MIN;
        loop {
            let mut k = corr * hyper.signal_variance;
            for i in 0..n {
                k[(i, i)] += nugget;
            }
            if let Some(chol) = Cholesky::new(k) {
                let alpha = chol.solve(&y);
                let log_det: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
                let lml = -0.5 * y.dot(&alpha) - 0.5 * log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
                if lml.is_finite() {
                    return Ok(Self {
                        data: data.clone(),
                        hyper,
                        nugget,
                        chol,
                        alpha,
                        log_marginal_likelihood: lml,
                    });
                }
            }
            nugget *= 10.0;
            if nugget > NUGGET_MAX * (1.0 + 1e-9) {
                return Err(Error::IllConditioned { nugget: nugget / 10.0 });
            }
        }
    }

    pub fn hyper(&self) -> GpHyper {
        self.hyper
    }

    pub fn nugget(&self) -> f64 {
        self.nugget
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.log_marginal_likelihood
    }

    /// Prior variance in original output units.
    pub fn signal_variance(&self) -> f64 {
        self.hyper.signal_variance * self.data.y_std * self.data.y_std
    }

    /// Predictive mean and variance in original units. Variance is clamped at 0.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        check_input(x, self.data.lower.len())?;
        let u = self.data.unit(x);
        let kstar = DVector::from_iterator(
            self.data.inputs.len(),
            self.data.inputs.iter().map(|p| self.kernel(p, &u)),
        );
        let mean = kstar.dot(&self.alpha);
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&kstar)
            .ok_or(Error::IllConditioned { nugget: self.nugget })?;
        let var = (self.hyper.signal_variance - v.dot(&v)).max(0.0);
        let s = self.data.y_std;
        Ok((self.data.y_mean + s * mean, s * s * var))
    }

    fn kernel(&self, a: &[f64], b: &[f64]) -> f64 {
        self.hyper.signal_variance * (-sq_dist(a, b) / (2.0 * self.hyper.length_scale.powi(2))).exp()
    }
}

const REFINE_STEPS: usize = 8;

/// Weights for the noise-free interpolant `K^-1 y`, using the jittered
/// factor as a preconditioner. Stops once the residual on the unjittered
/// system no longer shrinks.
fn refine_weights(chol: &Cholesky<f64, Dyn>, corr: &DMatrix<f64>, signal_variance: f64, y: &DVector<f64>) -> DVector<f64> {
    let mut alpha = chol.solve(y);
    let residual = |a: &DVector<f64>| y - (corr * a) * signal_variance;
    let mut r = residual(&alpha);
    let mut norm = r.amax();
    for _ in 0..REFINE_STEPS {
        if norm <= 1e-14 {
            break;
        }
        let candidate = &alpha + chol.solve(&r);
        let next = residual(&candidate);
        let next_norm = next.amax();
        if !(next_norm < 0.5 * norm) {
            break;
        }
        alpha = candidate;
        r = next;
        norm = next_norm;
    }
    alpha
}

fn correlation(inputs: &[Vec<f64>], length_scale: f64) -> DMatrix<f64> {
    let n = inputs.len();
    let two_l2 = 2.0 * length_scale * length_scale;
    DMatrix::from_fn(n, n, |i, j| (-sq_dist(&inputs[i], &inputs[j]) / two_l2).exp())
}

/// Lower confidence bound `mean - kappa * sd`.
pub fn lcb(model: &GpModel, x: &[f64], kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be non-negative, got {kappa}")));
    }
    let (mean, var) = model.predict(x)?;
    if kappa == 0.0 {
        return Ok(mean);
    }
    Ok(mean - kappa * var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::BenchmarkId;

    fn line() -> ProblemSpec {
        ProblemSpec::new(BenchmarkId::Sphere, vec![-1.0], vec![1.0], vec![0.0]).unwrap()
    }

    #[test]
    fn two_points_interpolate() {
        let m = GpModel::fit(&line(), &[vec![-0.5], vec![0.5]], &[3.0, -1.0]).unwrap();
        let (mu, var) = m.predict(&[-0.5]).unwrap();
        assert!((mu - 3.0).abs() <= 1e-6 * 4.0);
        assert!(var <= 1e-6 * m.signal_variance());
    }

    #[test]
    fn symmetric_data_symmetric_predictions() {
        let xs = [vec![-0.8], vec![-0.3], vec![0.3], vec![0.8]];
        let ys = [2.0, 0.5, 0.5, 2.0];
        let m = GpModel::fit(&line(), &xs, &ys).unwrap();
        for t in [0.1, 0.45, 0.95] {
            let (a, va) = m.predict(&[-t]).unwrap();
            let (b, vb) = m.predict(&[t]).unwrap();
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            assert!((va - vb).abs() < 1e-8);
        }
    }

    #[test]
    fn variance_reverts_to_prior_far_away() {
        let spec = ProblemSpec::new(BenchmarkId::Sphere, vec![-100.0], vec![100.0], vec![0.0]).unwrap();
        let hyper = GpHyper {
            length_scale: 0.01,
            signal_variance: 1.0,
        };
        let m = GpModel::fit_with(&spec, &[vec![-1.0], vec![0.0], vec![1.0]], &[1.0, 0.0, 4.0], hyper).unwrap();
        // 50 units = 0.25 in the unit cube = 25 length-scales
        let (_, var) = m.predict(&[50.0]).unwrap();
        assert!(var >= 0.99 * m.signal_variance());
    }

    #[test]
    fn lcb_definition() {
        let m = GpModel::fit(&line(), &[vec![-0.5], vec![0.5], vec![0.0]], &[1.0, 2.0, 0.0]).unwrap();
        let x = [0.9];
        let (mu, var) = m.predict(&x).unwrap();
        assert_eq!(lcb(&m, &x, 0.0).unwrap(), mu);
        assert!((lcb(&m, &x, 2.0).unwrap() - (mu - 2.0 * var.sqrt())).abs() < 1e-12);
        assert!(lcb(&m, &x, -1.0).is_err());
    }

    #[test]
    fn rejects_single_sample_and_bad_input() {
        assert!(GpModel::fit(&line(), &[vec![0.0]], &[1.0]).is_err());
        let m = GpModel::fit(&line(), &[vec![-0.5], vec![0.5]], &[0.0, 1.0]).unwrap();
        assert!(m.predict(&[f64::NAN]).is_err());
    }

    #[test]
    fn refit_is_deterministic() {
        let xs = [vec![-0.7], vec![-0.1], vec![0.4], vec![0.6]];
        let ys = [1.0, -2.0, 0.3, 5.0];
        let a = GpModel::fit(&line(), &xs, &ys).unwrap();
        let b = GpModel::fit(&line(), &xs, &ys).unwrap();
        assert_eq!(a.predict(&[0.123]).unwrap(), b.predict(&[0.123]).unwrap());
    }
}
