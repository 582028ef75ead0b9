use std::path::Path;

use rayon::prelude::*;

use super::archive::{ResultsArchive, RunKey, RUNS_FILE};
use super::config::{ExperimentConfig, Method, ProblemEntry};
use super::table::{num, Table};
use crate::benchmarks::make_shifted;
use crate::error::{Error, Result};
use crate::portfolio::{run_framework, run_par_ibsaea, RunOutcome, RunRecord};
use crate::problem::BudgetLedger;
use crate::rng::{derive_seed, SeededRng};

/// Seed of the shifted problem instance, shared by every trial and method.
pub fn problem_seed(base_seed: u64, problem: ProblemEntry) -> u64 {
    derive_seed(&[
        b"problem",
        &base_seed.to_le_bytes(),
        problem.benchmark.name().as_bytes(),
        &(problem.dimension as u64).to_le_bytes(),
    ])
}

/// Root seed of one run.
pub fn run_seed(base_seed: u64, method: Method, problem: ProblemEntry, trial: usize) -> u64 {
    derive_seed(&[
        b"run",
        &base_seed.to_le_bytes(),
        method.name().as_bytes(),
        problem.benchmark.name().as_bytes(),
        &(problem.dimension as u64).to_le_bytes(),
        &(trial as u64).to_le_bytes(),
    ])
}

/// One trial of `method` on `problem`. The record's `seed` is
/// `base_seed + trial`.
pub fn run_single(config: &ExperimentConfig, method: Method, problem: ProblemEntry, trial: usize) -> Result<RunOutcome> {
    let objective = make_shifted(problem.benchmark, problem.dimension, problem_seed(config.base_seed, problem))?;
    let budget = BudgetLedger::protocol(problem.dimension);
    let rng = SeededRng::new(run_seed(config.base_seed, method, problem, trial));
    let constituents = method.constituents(&config.algorithms);
    let mut outcome = match method {
        Method::Portfolio(f) => run_framework(f, &objective, constituents, budget, &rng)?,
        Method::Standalone(c) => {
            let mut o = run_par_ibsaea(&objective, constituents, budget, &rng)?;
            o.record.framework = c.name().to_string();
            o
        }
    };
    outcome.record.seed = config.base_seed.wrapping_add(trial as u64);
    Ok(outcome)
}

/// Run every (method, problem, trial) of `config` on a pool of
/// `config.workers` threads. The archive does not depend on the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultsArchive> {
    config.validate()?;
    let jobs: Vec<(Method, ProblemEntry, usize)> = config
        .frameworks
        .iter()
        .flat_map(|&m| {
            config
                .problems
                .iter()
                .flat_map(move |&p| (0..config.trials).map(move |t| (m, p, t)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let records: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(m, p, t)| run_single(config, m, p, t).map(|o| o.record))
            .collect::<Result<Vec<_>>>()
    })?;
    ResultsArchive::from_records(records)
}

/// Final fitness of every run, one row per record.
pub fn results_table(archive: &ResultsArchive) -> Table {
    let mut t = Table::new(["framework", "problem", "dimension", "seed", "evaluations", "final_best"]);
    for r in archive.records() {
        t.push([
            r.framework.clone(),
            r.problem.clone(),
            r.dimension.to_string(),
            r.seed.to_string(),
            r.evaluations().to_string(),
            num(r.final_best),
        ]);
    }
    t
}

/// Wall-clock seconds per run. Kept apart from the archive, which must be
/// reproducible byte for byte.
pub fn timings_table(archive: &ResultsArchive) -> Table {
    let mut t = Table::new(["key", "wall_time_secs"]);
    for r in archive.records() {
        t.push([RunKey::of(r).to_string(), format!("{:.3}", r.wall_time_secs)]);
    }
    t
}

/// Write `runs.jsonl`, `results.csv` and `timings.csv` into `dir`.
pub fn write_run_outputs(archive: &ResultsArchive, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    archive.save(&dir.join(RUNS_FILE))?;
    results_table(archive).write_csv(&dir.join("results.csv"))?;
    timings_table(archive).write_csv(&dir.join("timings.csv"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::BenchmarkId;
    use crate::constituents::ConstituentId;
    use crate::portfolio::FrameworkId;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            frameworks: vec![Method::Portfolio(FrameworkId::Rs), Method::Standalone(ConstituentId::GorsSslpso)],
            problems: vec![ProblemEntry {
                benchmark: BenchmarkId::Sphere,
                dimension: 2,
            }],
            trials: 3,
            base_seed: 11,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn cardinality_and_seeds() {
        let a = run_experiment(&small()).unwrap();
        assert_eq!(a.len(), 6);
        let seeds: Vec<u64> = a.records().iter().filter(|r| r.framework == "rs").map(|r| r.seed).collect();
        assert_eq!(seeds, vec![11, 12, 13]);
        assert!(a.records().iter().all(|r| r.evaluations() == 10));
    }

    #[test]
    fn worker_count_does_not_matter() {
        let one = run_experiment(&small()).unwrap();
        let four = run_experiment(&ExperimentConfig { workers: 4, ..small() }).unwrap();
        assert_eq!(one.to_jsonl().unwrap(), four.to_jsonl().unwrap());
    }

    #[test]
    fn seeds_are_keyed() {
        let p = ProblemEntry {
            benchmark: BenchmarkId::Ackley,
            dimension: 10,
        };
        let m = Method::Portfolio(FrameworkId::UcbIbsaea);
        assert_ne!(run_seed(0, m, p, 0), run_seed(0, m, p, 1));
        assert_ne!(run_seed(0, m, p, 0), run_seed(0, Method::Portfolio(FrameworkId::Rs), p, 0));
        assert_eq!(run_seed(5, m, p, 2), run_seed(5, m, p, 2));
    }
}
