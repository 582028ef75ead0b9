use super::archive::{KeySelector, ResultsArchive};
use super::config::Method;
use super::table::{num, Table};
use crate::error::{Error, Result};
use crate::portfolio::RunRecord;
use crate::stats::{mean, sample_std};

fn matching<'a>(archive: &'a ResultsArchive, key: &KeySelector) -> Result<Vec<&'a RunRecord>> {
    let runs = archive.select(key);
    if runs.is_empty() {
        return Err(Error::MissingResults(format!("no runs for key {key}")));
    }
    Ok(runs)
}

/// Best-so-far over evaluation counts `2d..=5d` (init size to budget).
///
/// With a seed in the key: columns `evaluation_count,best_so_far`. Without:
/// `evaluation_count,mean,std,runs` across all seeds.
pub fn export_convergence(archive: &ResultsArchive, key: &KeySelector) -> Result<Table> {
    let runs = matching(archive, key)?;
    let first = runs[0];
    let counts = first.init_evaluations..=first.evaluations();
    if runs
        .iter()
        .any(|r| r.init_evaluations != first.init_evaluations || r.evaluations() != first.evaluations())
    {
        return Err(Error::Mismatch(format!("runs under {key} have different budgets")));
    }
    if key.seed.is_some() {
        let mut t = Table::new(["evaluation_count", "best_so_far"]);
        for c in counts {
            t.push([c.to_string(), num(first.best_so_far[c - 1])]);
        }
        return Ok(t);
    }
    let mut t = Table::new(["evaluation_count", "mean", "std", "runs"]);
    for c in counts {
        let v: Vec<f64> = runs.iter().map(|r| r.best_so_far[c - 1]).collect();
        t.push([c.to_string(), num(mean(&v)), num(sample_std(&v)), v.len().to_string()]);
    }
    Ok(t)
}

/// Arm selected in every generation of a sequential portfolio:
/// `seed,generation,constituent,reward`.
pub fn export_selections(archive: &ResultsArchive, key: &KeySelector) -> Result<Table> {
    let method: Method = key.framework.parse()?;
    if !method.is_sequential() {
        return Err(Error::InvalidArgument(format!(
            "{} does not select a single constituent per generation",
            key.framework
        )));
    }
    let runs = matching(archive, key)?;
    let mut t = Table::new(["seed", "generation", "constituent", "reward"]);
    for r in runs {
        for s in &r.selections {
            let reward = s
                .reward
                .ok_or_else(|| Error::Mismatch(format!("generation {} of seed {} has no reward", s.generation, r.seed)))?;
            t.push([r.seed.to_string(), s.generation.to_string(), s.constituents.join("+"), num(reward)]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portfolio::SelectionEntry;

    fn record(framework: &str, seed: u64, curve: Vec<f64>) -> RunRecord {
        RunRecord {
            framework: framework.into(),
            problem: "sphere".into(),
            dimension: 1,
            seed,
            init_evaluations: 2,
            final_best: *curve.last().unwrap(),
            selections: (3..=curve.len())
                .map(|i| SelectionEntry {
                    generation: i - 2,
                    constituents: vec!["vesaea".into()],
                    first_evaluation: i,
                    evaluations: 1,
                    batch_best: curve[i - 1],
                    reward: Some(0.25),
                })
                .collect(),
            best_so_far: curve,
            wall_time_secs: 0.0,
        }
    }

    fn archive() -> ResultsArchive {
        ResultsArchive::from_records(vec![
            record("ucb", 0, vec![4.0, 3.0, 2.0, 2.0, 1.0]),
            record("ucb", 1, vec![4.0, 3.0, 2.0, 2.0, 1.0]),
            record("par", 0, vec![5.0, 5.0, 1.0, 1.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn convergence_rows_span_init_to_budget() {
        let t = export_convergence(&archive(), &"ucb:sphere:1:0".parse().unwrap()).unwrap();
        assert_eq!(t.column("evaluation_count").unwrap(), vec!["2", "3", "4", "5"]);
        assert_eq!(t.column("best_so_far").unwrap(), vec!["3", "2", "2", "1"]);
        let agg = export_convergence(&archive(), &"ucb:sphere:1".parse().unwrap()).unwrap();
        assert!(agg.column("std").unwrap().iter().all(|s| *s == "0"));
        assert!(export_convergence(&archive(), &"ucb:sphere:2".parse().unwrap()).is_err());
    }

    #[test]
    fn selections_only_for_sequential() {
        let t = export_selections(&archive(), &"ucb:sphere:1".parse().unwrap()).unwrap();
        assert_eq!(t.len(), 6);
        assert!(export_selections(&archive(), &"par:sphere:1".parse().unwrap()).is_err());
    }
}
