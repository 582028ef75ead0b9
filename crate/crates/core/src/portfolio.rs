//! Portfolio frameworks over individual-based SAEAs.
//!
//! * `par`: every constituent proposes from the same archive snapshot each
//!   generation and all proposals are evaluated.
//! * `ucb`: a UCB-Tuned bandit picks one constituent per generation; rewards
//!   are batch-best fitness normalized by sliding-window empirical bounds.
//! * `rs` / `eg50`: the same sequential loop with random or epsilon-greedy
//!   (epsilon = 0.5) selection.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandit::{normalize_reward, update_bounds_sliding_window, BanditState, EmpiricalBounds, Policy};
use crate::constituents::Constituent;
use crate::database::{Database, Sample};
use crate::error::{Error, Result};
use crate::problem::{BudgetLedger, Objective};
use crate::rng::SeededRng;
use crate::sampling::{latin_hypercube_init, separate_from_archive};

pub const EG50_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrameworkId {
    #[serde(rename = "par")]
    ParIbsaea,
    #[serde(rename = "ucb")]
    UcbIbsaea,
    #[serde(rename = "rs")]
    Rs,
    #[serde(rename = "eg50")]
    Eg50,
}

impl FrameworkId {
    pub const ALL: [FrameworkId; 4] = [FrameworkId::UcbIbsaea, FrameworkId::ParIbsaea, FrameworkId::Rs, FrameworkId::Eg50];

    pub fn name(self) -> &'static str {
        match self {
            FrameworkId::ParIbsaea => "par",
            FrameworkId::UcbIbsaea => "ucb",
            FrameworkId::Rs => "rs",
            FrameworkId::Eg50 => "eg50",
        }
    }

    /// Selection policy of the sequential frameworks; `None` for `par`.
    pub fn policy(self) -> Option<Policy> {
        match self {
            FrameworkId::ParIbsaea => None,
            FrameworkId::UcbIbsaea => Some(Policy::UcbTuned),
            FrameworkId::Rs => Some(Policy::Random),
            FrameworkId::Eg50 => Some(Policy::EpsilonGreedy(EG50_EPSILON)),
        }
    }
}

impl fmt::Display for FrameworkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrameworkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FrameworkId::ALL
            .into_iter()
            .find(|f| f.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// What happened in one generation after initialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub generation: usize,
    /// Constituents whose proposals were evaluated this generation.
    pub constituents: Vec<String>,
    /// Evaluation index of the first sample of this generation.
    pub first_evaluation: usize,
    pub evaluations: usize,
    pub batch_best: f64,
    /// Normalized reward granted (sequential frameworks only).
    pub reward: Option<f64>,
}

/// One optimization trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub framework: String,
    pub problem: String,
    pub dimension: usize,
    pub seed: u64,
    pub init_evaluations: usize,
    /// `best_so_far[i]` is the best fitness after `i + 1` true evaluations.
    pub best_so_far: Vec<f64>,
    pub selections: Vec<SelectionEntry>,
    pub final_best: f64,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl RunRecord {
    pub fn evaluations(&self) -> usize {
        self.best_so_far.len()
    }

    /// Check the record's structural invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Mismatch(format!("{}:{}:{}:{}: {msg}", self.framework, self.problem, self.dimension, self.seed)));
        if self.best_so_far.is_empty() {
            return bad("empty convergence curve".into());
        }
        if self.best_so_far.iter().any(|v| !v.is_finite()) {
            return bad("non-finite best-so-far value".into());
        }
        if let Some(i) = self.best_so_far.windows(2).position(|w| w[1] > w[0]) {
            return bad(format!("best-so-far increases at evaluation {}", i + 2));
        }
        if self.final_best != *self.best_so_far.last().expect("non-empty") {
            return bad("final best disagrees with curve".into());
        }
        let mut next = self.init_evaluations + 1;
        for s in &self.selections {
            if s.first_evaluation != next || s.evaluations == 0 {
                return bad(format!("generation {} does not continue at evaluation {next}", s.generation));
            }
            if s.reward.is_some_and(|r| !(0.0..=1.0).contains(&r)) {
                return bad(format!("reward outside [0, 1] in generation {}", s.generation));
            }
            next += s.evaluations;
        }
        if next != self.evaluations() + 1 {
            return bad(format!("selection log ends at {} but {} evaluations were made", next - 1, self.evaluations()));
        }
        Ok(())
    }
}

/// A finished run: the record plus the archive and ledger that produced it.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub database: Database,
    pub ledger: BudgetLedger,
}

struct Run<'a> {
    objective: &'a dyn Objective,
    db: Database,
    ledger: BudgetLedger,
    curve: Vec<f64>,
    rng: SeededRng,
}

impl<'a> Run<'a> {
    fn start(objective: &'a dyn Objective, budget: BudgetLedger, root: &SeededRng) -> Result<Self> {
        if budget.used_evaluations() != 0 {
            return Err(Error::InvalidArgument("budget ledger must be unused".into()));
        }
        let spec = objective.spec();
        let mut rng = root.substream("framework");
        let init = latin_hypercube_init(spec, budget.init_evaluations(), &mut rng)?;
        let mut run = Self {
            objective,
            db: Database::new(),
            ledger: budget,
            curve: Vec::with_capacity(budget.max_evaluations()),
            rng,
        };
        let samples = run.evaluate(init.into_iter().map(|p| (p, None)).collect())?;
        run.commit(samples)?;
        Ok(run)
    }

    /// Truly evaluate `points` (truncated to the remaining budget) without
    /// touching the archive.
    fn evaluate(&mut self, points: Vec<(Vec<f64>, Option<String>)>) -> Result<Vec<Sample>> {
        let spec = self.objective.spec();
        let mut pending: Vec<Vec<f64>> = Vec::new();
        let mut out = Vec::new();
        let next_index = self.db.len() + 1;
        for (mut p, proposer) in points {
            if self.ledger.is_exhausted() {
                break;
            }
            spec.clamp(&mut p);
            separate_from_archive(spec, &mut p, &self.db, &pending, &mut self.rng);
            let f = self.objective.evaluate(&p)?;
            self.ledger.charge()?;
            pending.push(p.clone());
            out.push(Sample {
                point: p,
                fitness: f,
                evaluation_index: next_index + out.len(),
                proposer,
            });
        }
        Ok(out)
    }

    fn commit(&mut self, samples: Vec<Sample>) -> Result<Vec<Sample>> {
        let spec = self.objective.spec();
        let mut best = self.curve.last().copied().unwrap_or(f64::INFINITY);
        let mut stored = Vec::with_capacity(samples.len());
        for s in samples {
            best = best.min(s.fitness);
            self.curve.push(best);
            self.db.insert(spec, s.point, s.fitness, s.proposer)?;
            stored.push(self.db.samples().last().expect("just inserted").clone());
        }
        Ok(stored)
    }

    fn finish(self, framework: &str, seed: u64, selections: Vec<SelectionEntry>, started: Instant) -> RunOutcome {
        let spec = self.objective.spec();
        let record = RunRecord {
            framework: framework.to_string(),
            problem: spec.objective.name().to_string(),
            dimension: spec.dimension(),
            seed,
            init_evaluations: self.ledger.init_evaluations(),
            final_best: *self.curve.last().expect("initialized"),
            best_so_far: self.curve,
            selections,
            wall_time_secs: started.elapsed().as_secs_f64(),
        };
        RunOutcome {
            record,
            database: self.db,
            ledger: self.ledger,
        }
    }
}

fn constituent_streams(root: &SeededRng, constituents: &[Box<dyn Constituent>]) -> Vec<SeededRng> {
    constituents
        .iter()
        .map(|c| root.substream(&format!("constituent/{}", c.name())))
        .collect()
}

/// Parallel portfolio. With a single constituent this is that constituent's
/// standalone run.
pub fn run_par_ibsaea(
    objective: &dyn Objective,
    mut constituents: Vec<Box<dyn Constituent>>,
    budget: BudgetLedger,
    rng: &SeededRng,
) -> Result<RunOutcome> {
    if constituents.is_empty() {
        return Err(Error::InvalidArgument("need at least one constituent".into()));
    }
    let started = Instant::now();
    let mut run = Run::start(objective, budget, rng)?;
    let mut streams = constituent_streams(rng, &constituents);
    let spec = objective.spec();
    let mut log = Vec::new();
    let mut generation = 0;
    while !run.ledger.is_exhausted() {
        generation += 1;
        let db = &run.db;
        let batches = constituents
            .par_iter_mut()
            .zip(streams.par_iter_mut())
            .map(|(c, r)| c.propose(spec, db, r))
            .collect::<Result<Vec<_>>>()?;

        let first_evaluation = run.db.len() + 1;
        let nominated: Vec<(Vec<f64>, Option<String>)> = batches
            .into_iter()
            .flat_map(|b| {
                let proposer = b.proposer;
                b.points.into_iter().map(move |p| (p, Some(proposer.clone())))
            })
            .collect();
        let samples = run.evaluate(nominated)?;
        if samples.is_empty() {
            return Err(Error::InvalidArgument("a generation produced no evaluations".into()));
        }
        let mut contributors: Vec<String> = Vec::new();
        for s in &samples {
            let name = s.proposer.as_deref().expect("proposals carry a proposer");
            if !contributors.iter().any(|c| c == name) {
                contributors.push(name.to_string());
            }
        }
        let stored = run.commit(samples)?;
        for c in constituents.iter_mut() {
            c.notify(&run.db, &stored);
        }
        log.push(SelectionEntry {
            generation,
            constituents: contributors,
            first_evaluation,
            evaluations: stored.len(),
            batch_best: stored.iter().map(|s| s.fitness).fold(f64::INFINITY, f64::min),
            reward: None,
        });
    }
    Ok(run.finish(FrameworkId::ParIbsaea.name(), rng.seed(), log, started))
}

/// Sequential portfolio driven by `policy`. Every constituent observes every
/// new sample; only the selected one proposes.
pub fn run_sequential(
    objective: &dyn Objective,
    mut constituents: Vec<Box<dyn Constituent>>,
    budget: BudgetLedger,
    policy: Policy,
    rng: &SeededRng,
) -> Result<RunOutcome> {
    if constituents.is_empty() {
        return Err(Error::InvalidArgument("need at least one constituent".into()));
    }
    let started = Instant::now();
    let mut run = Run::start(objective, budget, rng)?;
    let mut streams = constituent_streams(rng, &constituents);
    let mut select_rng = rng.substream("selection");
    let spec = objective.spec();
    let mut bounds = EmpiricalBounds::from_database(&run.db, 2 * spec.dimension())?;
    let mut state = BanditState::new(constituents.len())?;
    let mut log = Vec::new();
    let mut generation = 0;
    while !run.ledger.is_exhausted() {
        generation += 1;
        let arm = match state.unpulled() {
            Some(j) if policy.needs_bootstrap() => j,
            _ => policy.select(&state, &mut select_rng)?,
        };
        let batch = constituents[arm].propose(spec, &run.db, &mut streams[arm])?;
        let first_evaluation = run.db.len() + 1;
        let proposer = Some(batch.proposer.clone());
        let evaluated = run.evaluate(batch.points.into_iter().map(|p| (p, proposer.clone())).collect())?;
        if evaluated.is_empty() {
            return Err(Error::InvalidArgument("a generation produced no evaluations".into()));
        }
        let stored = run.commit(evaluated)?;
        let batch_best = stored.iter().map(|s| s.fitness).fold(f64::INFINITY, f64::min);
        let reward = normalize_reward(batch_best, &bounds);
        state.record_pull(arm, reward)?;
        bounds = update_bounds_sliding_window(&run.db, &bounds)?;
        for c in constituents.iter_mut() {
            c.notify(&run.db, &stored);
        }
        log.push(SelectionEntry {
            generation,
            constituents: vec![batch.proposer],
            first_evaluation,
            evaluations: stored.len(),
            batch_best,
            reward: Some(reward),
        });
    }
    let name = match policy {
        Policy::UcbTuned => FrameworkId::UcbIbsaea.name(),
        Policy::Random => FrameworkId::Rs.name(),
        Policy::EpsilonGreedy(_) => FrameworkId::Eg50.name(),
    };
    Ok(run.finish(name, rng.seed(), log, started))
}

pub fn run_ucb_ibsaea(
    objective: &dyn Objective,
    constituents: Vec<Box<dyn Constituent>>,
    budget: BudgetLedger,
    rng: &SeededRng,
) -> Result<RunOutcome> {
    run_sequential(objective, constituents, budget, Policy::UcbTuned, rng)
}

/// RS or EG50 baseline.
pub fn run_baseline(
    objective: &dyn Objective,
    constituents: Vec<Box<dyn Constituent>>,
    budget: BudgetLedger,
    framework: FrameworkId,
    rng: &SeededRng,
) -> Result<RunOutcome> {
    match framework {
        FrameworkId::Rs | FrameworkId::Eg50 => {
            run_sequential(objective, constituents, budget, framework.policy().expect("sequential"), rng)
        }
        other => Err(Error::InvalidArgument(format!("{other} is not a baseline framework"))),
    }
}

pub fn run_framework(
    framework: FrameworkId,
    objective: &dyn Objective,
    constituents: Vec<Box<dyn Constituent>>,
    budget: BudgetLedger,
    rng: &SeededRng,
) -> Result<RunOutcome> {
    match framework.policy() {
        None => run_par_ibsaea(objective, constituents, budget, rng),
        Some(policy) => run_sequential(objective, constituents, budget, policy, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{make_shifted, BenchmarkId};
    use crate::constituents::ConstituentId;

    fn all() -> Vec<Box<dyn Constituent>> {
        ConstituentId::ALL.iter().map(|c| c.build()).collect()
    }

    #[test]
    fn framework_names() {
        for f in FrameworkId::ALL {
            assert_eq!(f.name().parse::<FrameworkId>().unwrap(), f);
        }
        assert!("pap".parse::<FrameworkId>().is_err());
    }

    #[test]
    fn par_first_generation_uses_four_evaluations() {
        let obj = make_shifted(BenchmarkId::Sphere, 4, 1).unwrap();
        let out = run_par_ibsaea(&obj, all(), BudgetLedger::protocol(4), &SeededRng::new(3)).unwrap();
        let first = &out.record.selections[0];
        assert_eq!(first.evaluations, 4);
        assert_eq!(first.constituents, vec!["ego-lcb", "vesaea", "gors-sslpso"]);
        out.record.validate().unwrap();
    }

    #[test]
    fn par_single_constituent_generations() {
        let d = 3;
        let obj = make_shifted(BenchmarkId::Sphere, d, 1).unwrap();
        let out = run_par_ibsaea(&obj, vec![ConstituentId::EgoLcb.build()], BudgetLedger::protocol(d), &SeededRng::new(2)).unwrap();
        assert_eq!(out.record.selections.len(), 3 * d);
        assert_eq!(out.ledger.used_evaluations(), 5 * d);
    }

    #[test]
    fn par_truncates_in_registry_order() {
        // budget leaves 2 evaluations after init; first generation proposes 4
        let obj = make_shifted(BenchmarkId::Sphere, 3, 1).unwrap();
        let budget = BudgetLedger::new(8, 6).unwrap();
        let out = run_par_ibsaea(&obj, all(), budget, &SeededRng::new(5)).unwrap();
        assert_eq!(out.record.selections.len(), 1);
        let g = &out.record.selections[0];
        assert_eq!(g.evaluations, 2);
        assert_eq!(g.constituents, vec!["ego-lcb", "vesaea"]);
        let proposers: Vec<_> = out.database.samples()[6..].iter().map(|s| s.proposer.clone().unwrap()).collect();
        assert_eq!(proposers, vec!["ego-lcb", "vesaea"]);
    }

    #[test]
    fn sequential_rewards_in_unit_interval() {
        let obj = make_shifted(BenchmarkId::Rastrigin, 3, 2).unwrap();
        for f in [FrameworkId::UcbIbsaea, FrameworkId::Rs, FrameworkId::Eg50] {
            let out = run_framework(f, &obj, all(), BudgetLedger::protocol(3), &SeededRng::new(4)).unwrap();
            out.record.validate().unwrap();
            assert_eq!(out.record.framework, f.name());
            assert!(out.record.selections.iter().all(|s| s.reward.is_some_and(|r| (0.0..=1.0).contains(&r))));
            assert_eq!(out.database.len(), 15);
        }
    }

    #[test]
    fn ucb_bootstraps_in_registry_order() {
        let obj = make_shifted(BenchmarkId::Ackley, 3, 2).unwrap();
        let out = run_ucb_ibsaea(&obj, all(), BudgetLedger::protocol(3), &SeededRng::new(1)).unwrap();
        let first: Vec<&str> = out.record.selections[..3].iter().map(|s| s.constituents[0].as_str()).collect();
        assert_eq!(first, vec!["ego-lcb", "vesaea", "gors-sslpso"]);
    }

    #[test]
    fn baseline_rejects_proposed_frameworks() {
        let obj = make_shifted(BenchmarkId::Sphere, 2, 2).unwrap();
        assert!(run_baseline(&obj, all(), BudgetLedger::protocol(2), FrameworkId::UcbIbsaea, &SeededRng::new(1)).is_err());
    }

    #[test]
    fn validate_catches_broken_curves() {
        let obj = make_shifted(BenchmarkId::Sphere, 2, 2).unwrap();
        let out = run_par_ibsaea(&obj, all(), BudgetLedger::protocol(2), &SeededRng::new(1)).unwrap();
        let mut r = out.record.clone();
        r.best_so_far[5] = r.best_so_far[4] + 1.0;
        assert!(r.validate().is_err());
        let mut r = out.record;
        r.selections.pop();
        assert!(r.validate().is_err());
    }
}
