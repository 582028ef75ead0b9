use std::path::Path;

use super::table::{num, Table};
use crate::bandit::{simulate_bernoulli, Policy, SimStep};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Independent Bernoulli bandit trials; trial `t` draws from the substream
/// `trial/<t>` of `seed`.
pub fn bandit_sim(means: &[f64], horizon: usize, policy: Policy, trials: usize, seed: u64) -> Result<Vec<Vec<SimStep>>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let root = SeededRng::new(seed);
    (0..trials)
        .map(|t| {
            let mut rng = root.substream(&format!("trial/{t}"));
            simulate_bernoulli(means, horizon, policy, &mut rng)
        })
        .collect()
}

pub fn steps_table(steps: &[SimStep]) -> Table {
    let mut t = Table::new(["step", "arm", "reward", "cumulative_regret"]);
    for s in steps {
        t.push([s.step.to_string(), s.arm.to_string(), num(s.reward), num(s.cumulative_regret)]);
    }
    t
}

/// Write `trial_<t>.csv` per trial and `summary.csv` (final regret and share
/// of pulls on the best arm).
pub fn write_bandit_sim(runs: &[Vec<SimStep>], means: &[f64], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let best = means
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidArgument("no arms".into()))?;
    let mut summary = Table::new(["trial", "final_cumulative_regret", "best_arm_share"]);
    for (t, steps) in runs.iter().enumerate() {
        steps_table(steps).write_csv(&dir.join(format!("trial_{t}.csv")))?;
        let regret = steps.last().map_or(0.0, |s| s.cumulative_regret);
        let share = steps.iter().filter(|s| s.arm == best).count() as f64 / steps.len().max(1) as f64;
        summary.push([t.to_string(), num(regret), num(share)]);
    }
    summary.write_csv(&dir.join("summary.csv"))
}
