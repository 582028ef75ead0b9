//! Batch experiments: configuration, the run archive, convergence and
//! selection exports, comparison reports and the synthetic bandit simulator.

mod analyze;
mod archive;
mod bandit_sim;
mod config;
mod export;
mod run;
mod table;

pub use analyze::{analyze, missing_keys, AnalysisReport};
pub use archive::{KeySelector, ResultsArchive, RunKey, RUNS_FILE, SCHEMA, SCHEMA_VERSION};
pub use bandit_sim::{bandit_sim, steps_table, write_bandit_sim};
pub use config::{ExperimentConfig, Method, ProblemEntry};
pub use export::{export_convergence, export_selections};
pub use run::{
    problem_seed, results_table, run_experiment, run_seed, run_single, timings_table, write_run_outputs,
};
pub use table::Table;
