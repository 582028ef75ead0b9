//! Python bindings for the ibsaea core library.

use std::path::PathBuf;

use pyo3::exceptions::{PyKeyError, PyOSError, PyValueError};
use pyo3::prelude::*;

use ibsaea_core::bandit::{self, ArmStatistics, Policy};
use ibsaea_core::harness::{self, ExperimentConfig, Method, ProblemEntry, ResultsArchive};
use ibsaea_core::stats::{self, Verdict};
use ibsaea_core::surrogate::{self, GpModel, RbfModel};
use ibsaea_core::{make_shifted, BenchmarkId, Error, Objective, RunRecord, ShiftedObjective};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        Error::UnknownId(_) | Error::MissingResults(_) => PyKeyError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

/// A shifted benchmark function on its standard box.
#[pyclass(module = "ibsaea", frozen)]
struct Problem {
    inner: ShiftedObjective,
}

#[pymethods]
impl Problem {
    #[new]
    #[pyo3(signature = (benchmark, dimension, seed = 0))]
    fn new(benchmark: &str, dimension: usize, seed: u64) -> PyResult<Self> {
        let inner = make_shifted(parse(benchmark)?, dimension, seed).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn evaluate(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.evaluate(&x).map_err(to_py)
    }

    #[getter]
    fn benchmark(&self) -> &'static str {
        self.inner.base().name()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.spec().dimension()
    }

    #[getter]
    fn lower(&self) -> Vec<f64> {
        self.inner.spec().lower.clone()
    }

    #[getter]
    fn upper(&self) -> Vec<f64> {
        self.inner.spec().upper.clone()
    }

    #[getter]
    fn shift(&self) -> Vec<f64> {
        self.inner.shift().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Problem({}, dimension={})", self.benchmark(), self.dimension())
    }
}

/// Kriging model fitted by maximum likelihood over a fixed grid.
#[pyclass(module = "ibsaea", frozen)]
struct GaussianProcess {
    inner: GpModel,
}

#[pymethods]
impl GaussianProcess {
    #[new]
    fn new(problem: &Problem, points: Vec<Vec<f64>>, values: Vec<f64>) -> PyResult<Self> {
        let inner = GpModel::fit(problem.inner.spec(), &points, &values).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Posterior mean and variance at `x`.
    fn predict(&self, x: Vec<f64>) -> PyResult<(f64, f64)> {
        self.inner.predict(&x).map_err(to_py)
    }

    #[pyo3(signature = (x, kappa = 2.0))]
    fn lcb(&self, x: Vec<f64>, kappa: f64) -> PyResult<f64> {
        surrogate::lcb(&self.inner, &x, kappa).map_err(to_py)
    }

    #[getter]
    fn length_scale(&self) -> f64 {
        self.inner.hyper().length_scale
    }

    #[getter]
    fn signal_variance(&self) -> f64 {
        self.inner.signal_variance()
    }

    #[getter]
    fn log_marginal_likelihood(&self) -> f64 {
        self.inner.log_marginal_likelihood()
    }
}

/// Cubic radial basis interpolant with a linear tail.
#[pyclass(module = "ibsaea", frozen)]
struct Rbf {
    inner: RbfModel,
}

#[pymethods]
impl Rbf {
    #[new]
    fn new(problem: &Problem, points: Vec<Vec<f64>>, values: Vec<f64>) -> PyResult<Self> {
        let inner = RbfModel::fit(problem.inner.spec(), &points, &values).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn predict(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.predict(&x).map_err(to_py)
    }
}

/// Summary of one optimization run.
#[pyclass(module = "ibsaea", frozen, get_all)]
struct RunResult {
    framework: String,
    problem: String,
    dimension: usize,
    seed: u64,
    init_evaluations: usize,
    final_best: f64,
    /// Best fitness after each evaluation.
    best_so_far: Vec<f64>,
    /// `(generation, constituents, reward)` per generation.
    selections: Vec<(usize, Vec<String>, Option<f64>)>,
}

impl From<&RunRecord> for RunResult {
    fn from(r: &RunRecord) -> Self {
        Self {
            framework: r.framework.clone(),
            problem: r.problem.clone(),
            dimension: r.dimension,
            seed: r.seed,
            init_evaluations: r.init_evaluations,
            final_best: r.final_best,
            best_so_far: r.best_so_far.clone(),
            selections: r
                .selections
                .iter()
                .map(|s| (s.generation, s.constituents.clone(), s.reward))
                .collect(),
        }
    }
}

#[pymethods]
impl RunResult {
    #[getter]
    fn evaluations(&self) -> usize {
        self.best_so_far.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult({}:{}:{}:{}, final_best={})",
            self.framework, self.problem, self.dimension, self.seed, self.final_best
        )
    }
}

/// Names of the benchmark functions.
#[pyfunction]
fn benchmarks() -> Vec<&'static str> {
    BenchmarkId::ALL.iter().map(|b| b.name()).collect()
}

/// Unshifted benchmark value at `z`.
#[pyfunction]
fn base_value(benchmark: &str, z: Vec<f64>) -> PyResult<f64> {
    Ok(parse::<BenchmarkId>(benchmark)?.base(&z))
}

/// UCB-Tuned score of an arm with reward `history` after `n` total pulls.
#[pyfunction]
fn ucb_tuned_score(history: Vec<f64>, n: usize) -> PyResult<f64> {
    let arm = ArmStatistics::from_history(&history).map_err(to_py)?;
    bandit::ucb_tuned_score(&arm, n).map_err(to_py)
}

/// Simulate a Bernoulli bandit. Returns `(step, arm, reward, cumulative_regret)` rows.
#[pyfunction]
#[pyo3(signature = (means, horizon, policy = "ucb-t", seed = 0))]
fn bandit_sim(means: Vec<f64>, horizon: usize, policy: &str, seed: u64) -> PyResult<Vec<(usize, usize, f64, f64)>> {
    let policy: Policy = parse(policy)?;
    let mut runs = harness::bandit_sim(&means, horizon, policy, 1, seed).map_err(to_py)?;
    Ok(runs
        .pop()
        .unwrap_or_default()
        .into_iter()
        .map(|s| (s.step, s.arm, s.reward, s.cumulative_regret))
        .collect())
}

/// One run of `method` (a framework or a single constituent) on a benchmark.
#[pyfunction]
#[pyo3(signature = (method, benchmark, dimension, trial = 0, base_seed = 0))]
fn run(py: Python<'_>, method: &str, benchmark: &str, dimension: usize, trial: usize, base_seed: u64) -> PyResult<RunResult> {
    let method: Method = parse(method)?;
    let entry = ProblemEntry {
        benchmark: parse(benchmark)?,
        dimension,
    };
    let config = ExperimentConfig {
        base_seed,
        ..ExperimentConfig::default()
    };
    let outcome = py
        .detach(|| harness::run_single(&config, method, entry, trial))
        .map_err(to_py)?;
    Ok(RunResult::from(&outcome.record))
}

/// Run the experiment described by a JSON config file. Results are also
/// written to `out_dir` when given.
#[pyfunction]
#[pyo3(signature = (config_path, out_dir = None))]
fn run_experiment(py: Python<'_>, config_path: PathBuf, out_dir: Option<PathBuf>) -> PyResult<Vec<RunResult>> {
    let config = ExperimentConfig::load(&config_path).map_err(to_py)?;
    config.validate().map_err(to_py)?;
    let archive = py.detach(|| harness::run_experiment(&config)).map_err(to_py)?;
    if let Some(dir) = out_dir {
        harness::write_run_outputs(&archive, &dir).map_err(to_py)?;
    }
    Ok(archive.records().iter().map(RunResult::from).collect())
}

/// Load a results directory (or runs file).
#[pyfunction]
fn load_results(path: PathBuf) -> PyResult<Vec<RunResult>> {
    let archive = ResultsArchive::load(&path).map_err(to_py)?;
    Ok(archive.records().iter().map(RunResult::from).collect())
}

/// Comparison report for a results directory; returns the text summary.
#[pyfunction]
#[pyo3(signature = (results, controls = Vec::new(), alpha = 0.05, out_dir = None))]
fn analyze(results: PathBuf, controls: Vec<String>, alpha: f64, out_dir: Option<PathBuf>) -> PyResult<String> {
    let archive = ResultsArchive::load(&results).map_err(to_py)?;
    let report = harness::analyze(&archive, &controls, alpha).map_err(to_py)?;
    if let Some(dir) = out_dir {
        report.write(&dir).map_err(to_py)?;
    }
    Ok(report.to_text().to_string())
}

/// Rank-sum test of `a` against `b` (lower is better).
/// Returns `(statistic, p_value, verdict)` with verdict win, draw or lose.
#[pyfunction]
#[pyo3(signature = (a, b, alpha = 0.05))]
fn wilcoxon_rank_sum(a: Vec<f64>, b: Vec<f64>, alpha: f64) -> PyResult<(f64, f64, &'static str)> {
    let t = stats::wilcoxon_rank_sum(&a, &b, alpha).map_err(to_py)?;
    let verdict = match t.verdict {
        Verdict::Win => "win",
        Verdict::Draw => "draw",
        Verdict::Lose => "lose",
    };
    Ok((t.statistic, t.p_value, verdict))
}

/// Fraction of pairs where `a` is strictly better than `b`.
#[pyfunction]
fn pairwise_outperform(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    stats::pairwise_outperform(&a, &b).map_err(to_py)
}

#[pyfunction]
fn mid_ranks(values: Vec<f64>) -> Vec<f64> {
    stats::mid_ranks(&values)
}

#[pymodule]
fn ibsaea(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<GaussianProcess>()?;
    m.add_class::<Rbf>()?;
    m.add_class::<RunResult>()?;
    m.add_function(wrap_pyfunction!(benchmarks, m)?)?;
    m.add_function(wrap_pyfunction!(base_value, m)?)?;
    m.add_function(wrap_pyfunction!(ucb_tuned_score, m)?)?;
    m.add_function(wrap_pyfunction!(bandit_sim, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(load_results, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(wilcoxon_rank_sum, m)?)?;
    m.add_function(wrap_pyfunction!(pairwise_outperform, m)?)?;
    m.add_function(wrap_pyfunction!(mid_ranks, m)?)?;
    Ok(())
}
