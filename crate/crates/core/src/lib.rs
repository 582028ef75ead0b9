//! Algorithm portfolios for expensive black-box optimization.
//!
//! Three individual-based surrogate-assisted EAs (EGO-LCB, a Voronoi-based
//! SAEA and a restart social-learning PSO) are combined either in parallel
//! (`par`) or under a UCB-Tuned bandit (`ucb`), with random and
//! epsilon-greedy selection as baselines. The [`harness`] module runs batch
//! experiments and the [`stats`] module compares their results.

pub mod bandit;
pub mod benchmarks;
pub mod constituents;
pub mod database;
pub mod error;
pub mod harness;
pub mod portfolio;
pub mod problem;
pub mod rng;
pub mod sampling;
pub mod stats;
pub mod surrogate;

pub use benchmarks::{make_shifted, BenchmarkId, ShiftedObjective};
pub use constituents::{Constituent, ConstituentId, ProposalBatch};
pub use database::{Database, Sample};
pub use error::{Error, Result};
pub use portfolio::{FrameworkId, RunOutcome, RunRecord};
pub use problem::{BudgetLedger, Objective, ProblemSpec};
pub use rng::SeededRng;
