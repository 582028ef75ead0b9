use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::archive::{ResultsArchive, RunKey};
use super::config::Method;
use super::table::{num, sci, Table};
use crate::benchmarks::BenchmarkId;
use crate::error::{Error, Result};
use crate::stats::{average_ranking, risk, wilcoxon_rank_sum, ResultMatrix, Verdict};

/// Comparison tables built from a complete archive.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub methods: Vec<String>,
    pub problems: Vec<String>,
    /// `problem` then `<method>_mean`, `<method>_std` per method.
    pub summary: Table,
    /// `method,average_rank`.
    pub ranking: Table,
    /// Per-problem tests of each control against each other method.
    pub wilcoxon: Table,
    /// `control,method,win,draw,lose`, counted from the control's side.
    pub win_draw_lose: Table,
    /// Row method beats column method with this probability.
    pub risk: Table,
    text: String,
}

fn problem_label(problem: &str, dimension: usize) -> String {
    format!("{problem}-{dimension}")
}

fn benchmark_order(problem: &str) -> usize {
    BenchmarkId::ALL
        .iter()
        .position(|b| b.name() == problem)
        .unwrap_or(usize::MAX)
}

/// Every (method, problem, dimension, seed) combination the archive should
/// hold but does not.
pub fn missing_keys(archive: &ResultsArchive) -> Vec<RunKey> {
    let methods: BTreeSet<&str> = archive.records().iter().map(|r| r.framework.as_str()).collect();
    let problems: BTreeSet<(&str, usize)> = archive
        .records()
        .iter()
        .map(|r| (r.problem.as_str(), r.dimension))
        .collect();
    let seeds: BTreeSet<u64> = archive.records().iter().map(|r| r.seed).collect();
    let mut missing = Vec::new();
    for m in &methods {
        for (p, d) in &problems {
            for s in &seeds {
                let key = RunKey {
                    framework: m.to_string(),
                    problem: p.to_string(),
                    dimension: *d,
                    seed: *s,
                };
                if archive.get(&key).is_none() {
                    missing.push(key);
                }
            }
        }
    }
    missing
}

/// Build the report. `controls` are compared against every other method with
/// a rank-sum test at level `alpha`.
pub fn analyze(archive: &ResultsArchive, controls: &[String], alpha: f64) -> Result<AnalysisReport> {
    if archive.is_empty() {
        return Err(Error::MissingResults("archive is empty".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let missing = missing_keys(archive);
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(ToString::to_string).collect();
        return Err(Error::MissingResults(format!(
            "{} run(s) missing from the cross product: {}",
            missing.len(),
            list.join(", ")
        )));
    }

    let mut matrix = ResultMatrix::new();
    let mut problem_keys: BTreeMap<(usize, String, usize), String> = BTreeMap::new();
    for r in archive.records() {
        let label = problem_label(&r.problem, r.dimension);
        matrix.push(&r.framework, &label, r.final_best)?;
        problem_keys.insert((benchmark_order(&r.problem), r.problem.clone(), r.dimension), label);
    }
    let problems: Vec<String> = problem_keys.into_values().collect();
    let mut methods: Vec<String> = matrix.methods().iter().map(|s| s.to_string()).collect();
    methods.sort_by_key(|m| (Method::order(m), m.clone()));
    let names: Vec<&str> = methods.iter().map(String::as_str).collect();
    for c in controls {
        if !methods.contains(c) {
            return Err(Error::UnknownId(format!("control {c} is not in the archive")));
        }
    }

    let mut summary = Table::new(
        std::iter::once("problem".to_string())
            .chain(methods.iter().flat_map(|m| [format!("{m}_mean"), format!("{m}_std")])),
    );
    let mut text_summary = Table::new(std::iter::once("problem").chain(names.iter().copied()));
    for p in &problems {
        let mut row = vec![p.clone()];
        let mut text_row = vec![p.clone()];
        for m in &names {
            let mu = matrix.mean(m, p).expect("complete");
            let sd = matrix.std(m, p).expect("complete");
            row.push(num(mu));
            row.push(num(sd));
            text_row.push(format!("{}±{}", sci(mu), sci(sd)));
        }
        summary.push(row);
        text_summary.push(text_row);
    }

    let ranks = average_ranking(&matrix, &names)?;
    let mut ranking = Table::new(["method", "average_rank"]);
    for (m, r) in names.iter().zip(&ranks) {
        ranking.push([m.to_string(), format!("{r:.4}")]);
    }

    let mut wilcoxon = Table::new(["control", "method", "problem", "statistic", "p_value", "verdict"]);
    let mut win_draw_lose = Table::new(["control", "method", "win", "draw", "lose"]);
    for c in controls {
        for m in names.iter().filter(|m| **m != c.as_str()) {
            let mut counts = [0usize; 3];
            for p in &problems {
                let a = matrix.trials(c, p).expect("complete");
                let b = matrix.trials(m, p).expect("complete");
                let t = wilcoxon_rank_sum(a, b, alpha)?;
                let (idx, tag) = match t.verdict {
                    Verdict::Win => (0, "win"),
                    Verdict::Draw => (1, "draw"),
                    Verdict::Lose => (2, "lose"),
                };
                counts[idx] += 1;
                wilcoxon.push([c.clone(), m.to_string(), p.clone(), num(t.statistic), num(t.p_value), tag.to_string()]);
            }
            win_draw_lose.push([
                c.clone(),
                m.to_string(),
                counts[0].to_string(),
                counts[1].to_string(),
                counts[2].to_string(),
            ]);
        }
    }

    let mut risk_table = Table::new(std::iter::once("method").chain(names.iter().copied()));
    for i in &names {
        let mut row = vec![i.to_string()];
        for j in &names {
            row.push(if i == j { "-".to_string() } else { format!("{:.4}", risk(&matrix, i, j)?) });
        }
        risk_table.push(row);
    }

    let mut text = String::new();
    text.push_str("Final fitness (mean±std)\n\n");
    text.push_str(&text_summary.to_text());
    text.push_str("\nAverage ranking\n\n");
    text.push_str(&ranking.to_text());
    if !controls.is_empty() {
        text.push_str(&format!("\nRank-sum test at alpha = {alpha} (control vs method)\n\n"));
        text.push_str(&win_draw_lose.to_text());
    }
    text.push_str("\nProbability that the row method beats the column method\n\n");
    text.push_str(&risk_table.to_text());

    Ok(AnalysisReport {
        methods,
        problems,
        summary,
        ranking,
        wilcoxon,
        win_draw_lose,
        risk: risk_table,
        text,
    })
}

impl AnalysisReport {
    pub fn to_text(&self) -> &str {
        &self.text
    }

    /// Write every table as CSV plus `report.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.summary.write_csv(&dir.join("summary.csv"))?;
        self.ranking.write_csv(&dir.join("ranking.csv"))?;
        self.wilcoxon.write_csv(&dir.join("wilcoxon.csv"))?;
        self.win_draw_lose.write_csv(&dir.join("win_draw_lose.csv"))?;
        self.risk.write_csv(&dir.join("risk.csv"))?;
        std::fs::write(dir.join("report.txt"), &self.text)?;
        Ok(())
    }
}
