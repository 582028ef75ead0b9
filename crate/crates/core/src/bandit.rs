//! Multi-armed bandit machinery: UCB-Tuned scoring, epsilon-greedy and random
//! policies, fitness-to-reward normalization with sliding-window empirical
//! bounds, and pseudo-regret accounting.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::database::Database;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Reward history of one arm.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmStatistics {
    pub pulls: usize,
    pub reward_sum: f64,
    pub reward_sq_sum: f64,
    pub history: Vec<f64>,
}

impl ArmStatistics {
    pub fn from_history(history: &[f64]) -> Result<Self> {
        let mut arm = Self::default();
        for &r in history {
            arm.record(r)?;
        }
        Ok(arm)
    }

    pub fn record(&mut self, reward: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::RewardOutOfRange(reward));
        }
        self.pulls += 1;
        self.reward_sum += reward;
        self.reward_sq_sum += reward * reward;
        self.history.push(reward);
        Ok(())
    }

    pub fn mean(&self) -> Option<f64> {
        (self.pulls > 0).then(|| self.reward_sum / self.pulls as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditState {
    pub arms: Vec<ArmStatistics>,
    pub total_pulls: usize,
}

impl BanditState {
    pub fn new(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidArgument("a bandit needs at least one arm".into()));
        }
        Ok(Self {
            arms: vec![ArmStatistics::default(); k],
            total_pulls: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    /// First arm with no pulls, if any.
    pub fn unpulled(&self) -> Option<usize> {
        self.arms.iter().position(|a| a.pulls == 0)
    }

    pub fn record_pull(&mut self, arm: usize, reward: f64) -> Result<()> {
        let k = self.arms.len();
        let stats = self
            .arms
            .get_mut(arm)
            .ok_or_else(|| Error::InvalidArgument(format!("arm {arm} out of range for {k} arms")))?;
        stats.record(reward)?;
        self.total_pulls += 1;
        Ok(())
    }
}

/// UCB-Tuned index of an arm after `n` total pulls:
///
/// `mean + sqrt(ln n / T * min(1/4, V))` with
/// `V = (1/T) sum r^2 - mean^2 + sqrt(2 ln n / T)`.
pub fn ucb_tuned_score(arm: &ArmStatistics, n: usize) -> Result<f64> {
    if arm.pulls == 0 {
        return Err(Error::UnpulledArm(0));
    }
    if n < arm.pulls {
        return Err(Error::InvalidArgument(format!("n = {n} is below the arm's pull count {}", arm.pulls)));
    }
    let s = arm.pulls as f64;
    let ln_n = (n as f64).ln();
    let mean = arm.reward_sum / s;
    let v = arm.reward_sq_sum / s - mean * mean + (2.0 * ln_n / s).sqrt();
    // the sample-variance term can dip a hair below zero in floating point
    let bonus = (ln_n / s * v.clamp(0.0, 0.25)).sqrt();
    Ok(mean + bonus)
}

fn argmax_random_tie(values: &[f64], rng: &mut SeededRng) -> usize {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..values.len()).filter(|&i| values[i] == max).collect();
    if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.index(ties.len())]
    }
}

/// Arm with the largest UCB-Tuned score; exact ties broken uniformly.
pub fn select_arm_ucb(state: &BanditState, rng: &mut SeededRng) -> Result<usize> {
    if let Some(j) = state.unpulled() {
        return Err(Error::UnpulledArm(j));
    }
    let scores = state
        .arms
        .iter()
        .map(|a| ucb_tuned_score(a, state.total_pulls))
        .collect::<Result<Vec<_>>>()?;
    Ok(argmax_random_tie(&scores, rng))
}

/// With probability `1 - epsilon` the arm with the largest cumulative reward,
/// otherwise a uniformly random arm.
pub fn select_arm_epsilon_greedy(state: &BanditState, epsilon: f64, rng: &mut SeededRng) -> Result<usize> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside [0, 1]")));
    }
    if let Some(j) = state.unpulled() {
        return Err(Error::UnpulledArm(j));
    }
    if rng.uniform() < epsilon {
        return Ok(rng.index(state.len()));
    }
    let sums: Vec<f64> = state.arms.iter().map(|a| a.reward_sum).collect();
    Ok(argmax_random_tie(&sums, rng))
}

pub fn select_arm_random(k: usize, rng: &mut SeededRng) -> Result<usize> {
    if k < 1 {
        return Err(Error::InvalidArgument("need at least one arm".into()));
    }
    Ok(rng.index(k))
}

/// Running fitness bounds used to map raw fitness into a `[0, 1]` reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalBounds {
    pub lower: f64,
    pub upper: f64,
    pub window: usize,
}

impl EmpiricalBounds {
    /// Bounds spanning every fitness in `db`.
    pub fn from_database(db: &Database, window: usize) -> Result<Self> {
        if window < 1 {
            return Err(Error::InvalidArgument("sliding window must be >= 1".into()));
        }
        let ys = db.fitness_values();
        if ys.is_empty() {
            return Err(Error::EmptyDatabase);
        }
        Ok(Self {
            lower: ys.iter().copied().fold(f64::INFINITY, f64::min),
            upper: ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            window,
        })
    }
}

/// `(eUB - f) / (eUB - eLB)` clamped to `[0, 1]`. Degenerate bounds give 1
/// for `f <= eLB` and 0 otherwise.
pub fn normalize_reward(fitness: f64, bounds: &EmpiricalBounds) -> f64 {
    let span = bounds.upper - bounds.lower;
    if !(span > 0.0) {
        return if fitness <= bounds.lower { 1.0 } else { 0.0 };
    }
    ((bounds.upper - fitness) / span).clamp(0.0, 1.0)
}

/// Tighten the bounds from the `window` best archived samples. Either bound
/// only ever moves down.
pub fn update_bounds_sliding_window(db: &Database, bounds: &EmpiricalBounds) -> Result<EmpiricalBounds> {
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    if bounds.window < 1 {
        return Err(Error::InvalidArgument("sliding window must be >= 1".into()));
    }
    let mut ys = db.fitness_values();
    ys.sort_by(f64::total_cmp);
    ys.truncate(bounds.window);
    let (min, max) = (ys[0], ys[ys.len() - 1]);
    let mut next = *bounds;
    if bounds.lower > min {
        next.lower = min;
    }
    if bounds.upper > max {
        next.upper = max;
    }
    Ok(next)
}

/// Expected per-arm rewards for pseudo-regret accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    pub true_means: Vec<f64>,
    pub pulls: Vec<usize>,
}

impl RegretLedger {
    pub fn new(true_means: Vec<f64>) -> Result<Self> {
        if true_means.is_empty() {
            return Err(Error::InvalidArgument("need at least one arm".into()));
        }
        let k = true_means.len();
        Ok(Self {
            true_means,
            pulls: vec![0; k],
        })
    }

    pub fn best_mean(&self) -> f64 {
        self.true_means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn record(&mut self, arm: usize) {
        self.pulls[arm] += 1;
    }
}

/// `R_n = mu* n - sum_j T_j(n) mu_j`.
pub fn cumulative_regret(ledger: &RegretLedger, n: usize) -> Result<f64> {
    if ledger.pulls.len() != ledger.true_means.len() {
        return Err(Error::Mismatch("pull counts and means differ in length".into()));
    }
    let total: usize = ledger.pulls.iter().sum();
    if total != n {
        return Err(Error::Mismatch(format!("pull counts sum to {total}, expected {n}")));
    }
    let earned: f64 = ledger.pulls.iter().zip(&ledger.true_means).map(|(t, m)| *t as f64 * m).sum();
    Ok((ledger.best_mean() * n as f64 - earned).max(0.0))
}

/// Arm-selection rule shared by the synthetic simulator and the portfolios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Policy {
    UcbTuned,
    EpsilonGreedy(f64),
    Random,
}

impl Policy {
    /// Whether the policy needs every arm pulled once before it can score.
    pub fn needs_bootstrap(self) -> bool {
        !matches!(self, Policy::Random)
    }

    pub fn select(self, state: &BanditState, rng: &mut SeededRng) -> Result<usize> {
        match self {
            Policy::UcbTuned => select_arm_ucb(state, rng),
            Policy::EpsilonGreedy(eps) => select_arm_epsilon_greedy(state, eps, rng),
            Policy::Random => select_arm_random(state.len(), rng),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::UcbTuned => f.write_str("ucb-t"),
            Policy::EpsilonGreedy(e) => write!(f, "eg:{e}"),
            Policy::Random => f.write_str("rs"),
        }
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ucb-t" | "ucb" => Ok(Policy::UcbTuned),
            "rs" | "random" => Ok(Policy::Random),
            other => {
                let eps = other
                    .strip_prefix("eg:")
                    .ok_or_else(|| Error::UnknownId(other.to_string()))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("epsilon in '{other}': {e}")))?;
                if !(0.0..=1.0).contains(&eps) {
                    return Err(Error::InvalidArgument(format!("epsilon {eps} outside [0, 1]")));
                }
                Ok(Policy::EpsilonGreedy(eps))
            }
        }
    }
}

/// One step of a synthetic Bernoulli bandit run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimStep {
    pub step: usize,
    pub arm: usize,
    pub reward: f64,
    pub cumulative_regret: f64,
}

/// Play `policy` for `horizon` pulls on Bernoulli arms with the given means.
pub fn simulate_bernoulli(means: &[f64], horizon: usize, policy: Policy, rng: &mut SeededRng) -> Result<Vec<SimStep>> {
    if means.iter().any(|m| !(0.0..=1.0).contains(m)) {
        return Err(Error::InvalidArgument("Bernoulli means must lie in [0, 1]".into()));
    }
    let mut state = BanditState::new(means.len())?;
    let mut ledger = RegretLedger::new(means.to_vec())?;
    let mut steps = Vec::with_capacity(horizon);
    for step in 1..=horizon {
        let arm = match state.unpulled() {
            Some(j) if policy.needs_bootstrap() => j,
            _ => policy.select(&state, rng)?,
        };
        let reward = if rng.uniform() < means[arm] { 1.0 } else { 0.0 };
        state.record_pull(arm, reward)?;
        ledger.record(arm);
        steps.push(SimStep {
            step,
            arm,
            reward,
            cumulative_regret: cumulative_regret(&ledger, step)?,
        });
    }
    Ok(steps)
}
