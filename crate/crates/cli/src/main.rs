use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ibsaea_core::bandit::Policy;
use ibsaea_core::harness::{
    analyze, bandit_sim, export_convergence, export_selections, run_experiment, write_bandit_sim,
    write_run_outputs, ExperimentConfig, KeySelector, Method, ResultsArchive,
};
use ibsaea_core::{BenchmarkId, ConstituentId};

#[derive(Parser)]
#[command(name = "ibsaea", version, about = "Algorithm portfolios of surrogate-assisted EAs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of optimization experiments.
    Run {
        /// JSON experiment configuration; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Portfolio frameworks and/or single constituents to run.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        frameworks: Option<Vec<Method>>,
        /// Constituents making up every portfolio.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        algorithms: Option<Vec<ConstituentId>>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        problems: Option<Vec<BenchmarkId>>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a Bernoulli bandit and record per-step regret.
    BanditSim {
        #[arg(long, value_delimiter = ',', required = true)]
        means: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        horizon: usize,
        /// ucb-t, eg:<epsilon> or rs.
        #[arg(long, default_value = "ucb-t")]
        policy: Policy,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build comparison tables from a results directory.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// Control method(s) for the rank-sum comparison.
        #[arg(long, value_delimiter = ',')]
        control: Vec<String>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print convergence or selection data of one key as CSV.
    Export {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        what: ExportKind,
        /// framework:problem:dim[:seed]
        #[arg(long)]
        key: KeySelector,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Convergence,
    Selections,
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            frameworks,
            algorithms,
            problems,
            dims,
            trials,
            seed,
            workers,
            out,
        } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
                None => ExperimentConfig::default(),
            };
            if let Some(f) = frameworks {
                cfg.frameworks = f;
            }
            if let Some(a) = algorithms {
                cfg.algorithms = a;
            }
            if problems.is_some() || dims.is_some() {
                let mut benchmarks: Vec<BenchmarkId> = cfg.problems.iter().map(|p| p.benchmark).collect();
                benchmarks.dedup();
                let mut dimensions: Vec<usize> = cfg.problems.iter().map(|p| p.dimension).collect();
                dimensions.sort_unstable();
                dimensions.dedup();
                cfg.set_problems(&problems.unwrap_or(benchmarks), &dims.unwrap_or(dimensions));
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if out.is_some() {
                cfg.output = out;
            }
            cfg.validate()?;
            let Some(dir) = cfg.output.clone() else {
                bail!("no output directory: pass --out or set \"output\" in the config");
            };
            let archive = run_experiment(&cfg)?;
            write_run_outputs(&archive, &dir).with_context(|| format!("writing {}", dir.display()))?;
            eprintln!("{} runs written to {}", archive.len(), dir.display());
        }
        Command::BanditSim {
            means,
            horizon,
            policy,
            trials,
            seed,
            out,
        } => {
            let runs = bandit_sim(&means, horizon, policy, trials, seed)?;
            write_bandit_sim(&runs, &means, &out).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("{trials} trial(s) of {policy} written to {}", out.display());
        }
        Command::Analyze {
            input,
            control,
            alpha,
            out,
        } => {
            let archive = ResultsArchive::load(&input).with_context(|| format!("loading {}", input.display()))?;
            let report = analyze(&archive, &control, alpha)?;
            print!("{}", report.to_text());
            if let Some(dir) = out {
                report.write(&dir).with_context(|| format!("writing {}", dir.display()))?;
            }
        }
        Command::Export { input, what, key, out } => {
            let archive = ResultsArchive::load(&input).with_context(|| format!("loading {}", input.display()))?;
            let table = match what {
                ExportKind::Convergence => export_convergence(&archive, &key)?,
                ExportKind::Selections => export_selections(&archive, &key)?,
            };
            match out {
                Some(path) => table.write_csv(&path)?,
                None => print!("{}", table.to_csv()?),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
