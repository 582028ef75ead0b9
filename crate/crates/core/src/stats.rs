//! Comparison statistics over final results: Wilcoxon rank-sum verdicts,
//! average ranking and the pairwise risk probability.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest per-group size for which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 20;

/// Final best fitness per (method, problem): one value per trial.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultMatrix {
    cells: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
}

impl ResultMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, method: &str, problem: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFiniteFitness(value));
        }
        self.cells
            .entry(method.to_string())
            .or_default()
            .entry(problem.to_string())
            .or_default()
            .push(value);
        Ok(())
    }

    pub fn methods(&self) -> Vec<&str> {
        self.cells.keys().map(String::as_str).collect()
    }

    /// Union of problems over all methods, sorted.
    pub fn problems(&self) -> Vec<&str> {
        let mut set: Vec<&str> = self.cells.values().flat_map(|m| m.keys().map(String::as_str)).collect();
        set.sort_unstable();
        set.dedup();
        set
    }

    pub fn trials(&self, method: &str, problem: &str) -> Option<&[f64]> {
        self.cells.get(method)?.get(problem).map(Vec::as_slice)
    }

    fn require(&self, method: &str, problem: &str) -> Result<&[f64]> {
        match self.trials(method, problem) {
            Some(t) if !t.is_empty() => Ok(t),
            _ => Err(Error::MissingResults(format!("{method} on {problem}"))),
        }
    }

    pub fn mean(&self, method: &str, problem: &str) -> Option<f64> {
        self.trials(method, problem).filter(|t| !t.is_empty()).map(mean)
    }

    /// Sample standard deviation (0 for a single trial).
    pub fn std(&self, method: &str, problem: &str) -> Option<f64> {
        self.trials(method, problem).filter(|t| !t.is_empty()).map(sample_std)
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Fraction of trial pairs in which `a` is strictly better (lower) than `b`.
pub fn pairwise_outperform(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("pairwise comparison needs non-empty samples".into()));
    }
    let wins: usize = a.iter().map(|x| b.iter().filter(|y| x < *y).count()).sum();
    Ok(wins as f64 / (a.len() * b.len()) as f64)
}

/// Probability that method `i` beats method `j`, averaged over problems.
pub fn risk(matrix: &ResultMatrix, i: &str, j: &str) -> Result<f64> {
    let problems = matrix.problems();
    if problems.is_empty() {
        return Err(Error::MissingResults("empty result matrix".into()));
    }
    let mut total = 0.0;
    for p in &problems {
        let (a, b) = (matrix.trials(i, p), matrix.trials(j, p));
        match (a, b) {
            (Some(a), Some(b)) if !a.is_empty() && !b.is_empty() => total += pairwise_outperform(a, b)?,
            _ => return Err(Error::Mismatch(format!("{i} and {j} are not both present on {p}"))),
        }
    }
    Ok(total / problems.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Win,
    Draw,
    Lose,
}

impl Verdict {
    pub fn flipped(self) -> Self {
        match self {
            Verdict::Win => Verdict::Lose,
            Verdict::Draw => Verdict::Draw,
            Verdict::Lose => Verdict::Win,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSumTest {
    /// Rank sum of the first sample.
    pub statistic: f64,
    pub p_value: f64,
    pub verdict: Verdict,
    pub exact: bool,
}

/// Mid-ranks (1-based) of `values`.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided Wilcoxon rank-sum test of `a` against `b` (minimization).
///
/// Exact null distribution (conditional on ties) when both samples have at
/// most [`EXACT_LIMIT`] values, otherwise a tie-corrected normal
/// approximation with continuity correction.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<RankSumTest> {
    if a.len() < 3 || b.len() < 3 {
        return Err(Error::InvalidArgument("rank-sum test needs at least 3 values per sample".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("rank-sum test needs finite values".into()));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = mid_ranks(&pooled);
    let statistic: f64 = ranks[..a.len()].iter().sum();
    if pooled.iter().all(|v| *v == pooled[0]) {
        return Ok(RankSumTest {
            statistic,
            p_value: 1.0,
            verdict: Verdict::Draw,
            exact: true,
        });
    }
    let exact = a.len() <= EXACT_LIMIT && b.len() <= EXACT_LIMIT;
    let p_value = if exact {
        exact_p_value(&ranks, a.len(), statistic)
    } else {
        normal_p_value(&ranks, a.len(), b.len(), statistic)
    };
    let verdict = if p_value < alpha {
        let (ma, mb) = (median(a), median(b));
        if ma < mb {
            Verdict::Win
        } else if ma > mb {
            Verdict::Lose
        } else {
            Verdict::Draw
        }
    } else {
        Verdict::Draw
    };
    Ok(RankSumTest {
        statistic,
        p_value,
        verdict,
        exact,
    })
}

/// Count subsets of size `m` by doubled rank sum (mid-ranks are multiples of 1/2).
fn exact_p_value(ranks: &[f64], m: usize, statistic: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // counts[k][s]: number of k-subsets with doubled sum s
    let mut counts = vec![vec![0f64; max_sum + 1]; m + 1];
    counts[0][0] = 1.0;
    for &r in &doubled {
        for k in (1..=m).rev() {
            for s in (r..=max_sum).rev() {
                let prev = counts[k - 1][s - r];
                if prev > 0.0 {
                    counts[k][s] += prev;
                }
            }
        }
    }
    let dist = &counts[m];
    let total: f64 = dist.iter().sum();
    let w = (2.0 * statistic).round() as usize;
    let lower: f64 = dist[..=w].iter().sum::<f64>() / total;
    let upper: f64 = dist[w..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

fn normal_p_value(ranks: &[f64], m: usize, n: usize, statistic: f64) -> f64 {
    let big_n = (m + n) as f64;
    let (mf, nf) = (m as f64, n as f64);
    let expected = mf * (big_n + 1.0) / 2.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = mf * nf / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let dev = ((statistic - expected).abs() - 0.5).max(0.0);
    let z = dev / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * (1.0 - normal.cdf(z))).min(1.0)
}

/// Mean rank per method over problems, ranking by mean final fitness
/// (ascending, mid-ranks for ties). Output order follows `methods`.
pub fn average_ranking(matrix: &ResultMatrix, methods: &[&str]) -> Result<Vec<f64>> {
    let problems = matrix.problems();
    if problems.is_empty() || methods.is_empty() {
        return Err(Error::MissingResults("empty result matrix".into()));
    }
    let mut totals = vec![0.0; methods.len()];
    for p in &problems {
        let means = methods
            .iter()
            .map(|m| matrix.require(m, p).map(mean))
            .collect::<Result<Vec<_>>>()?;
        for (t, r) in totals.iter_mut().zip(mid_ranks(&means)) {
            *t += r;
        }
    }
    Ok(totals.into_iter().map(|t| t / problems.len() as f64).collect())
}
