use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::benchmarks::BenchmarkId;
use crate::constituents::{Constituent, ConstituentId};
use crate::error::{Error, Result};
use crate::portfolio::FrameworkId;

/// Something that produces a run: a portfolio framework, or one constituent
/// run on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Portfolio(FrameworkId),
    Standalone(ConstituentId),
}

impl Method {
    /// Table order: proposed portfolios, baselines, then single algorithms.
    pub const ALL: [Method; 7] = [
        Method::Portfolio(FrameworkId::UcbIbsaea),
        Method::Portfolio(FrameworkId::ParIbsaea),
        Method::Portfolio(FrameworkId::Rs),
        Method::Portfolio(FrameworkId::Eg50),
        Method::Standalone(ConstituentId::GorsSslpso),
        Method::Standalone(ConstituentId::Vesaea),
        Method::Standalone(ConstituentId::EgoLcb),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Portfolio(f) => f.name(),
            Method::Standalone(c) => c.name(),
        }
    }

    pub fn is_sequential(self) -> bool {
        matches!(self, Method::Portfolio(f) if f.policy().is_some())
    }

    pub(crate) fn order(name: &str) -> usize {
        Method::ALL.iter().position(|m| m.name() == name).unwrap_or(usize::MAX)
    }

    pub(crate) fn constituents(self, algorithms: &[ConstituentId]) -> Vec<Box<dyn Constituent>> {
        match self {
            Method::Portfolio(_) => algorithms.iter().map(|c| c.build()).collect(),
            Method::Standalone(c) => vec![c.build()],
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(f) = s.parse::<FrameworkId>() {
            return Ok(Method::Portfolio(f));
        }
        s.parse::<ConstituentId>().map(Method::Standalone)
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemEntry {
    pub benchmark: BenchmarkId,
    pub dimension: usize,
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_algorithms() -> Vec<ConstituentId> {
    ConstituentId::ALL.to_vec()
}

fn default_problems() -> Vec<ProblemEntry> {
    BenchmarkId::ALL
        .iter()
        .flat_map(|&benchmark| [10, 20, 30].map(|dimension| ProblemEntry { benchmark, dimension }))
        .collect()
}

fn default_trials() -> usize {
    25
}

fn default_workers() -> usize {
    1
}

/// A batch of runs: methods x problems x trials.
///
/// JSON layout (every field optional):
///
/// ```json
/// {
///   "frameworks": ["ucb", "par", "rs", "eg50", "gors-sslpso", "vesaea", "ego-lcb"],
///   "algorithms": ["ego-lcb", "vesaea", "gors-sslpso"],
///   "problems": [{"benchmark": "sphere", "dimension": 10}],
///   "trials": 25,
///   "base_seed": 0,
///   "workers": 1,
///   "output": "results"
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_methods")]
    pub frameworks: Vec<Method>,
    /// Constituents of every portfolio method.
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<ConstituentId>,
    #[serde(default = "default_problems")]
    pub problems: Vec<ProblemEntry>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            frameworks: default_methods(),
            algorithms: default_algorithms(),
            problems: default_problems(),
            trials: default_trials(),
            base_seed: 0,
            workers: default_workers(),
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replace the problem list with the cross product `benchmarks x dims`.
    pub fn set_problems(&mut self, benchmarks: &[BenchmarkId], dims: &[usize]) {
        self.problems = benchmarks
            .iter()
            .flat_map(|&benchmark| dims.iter().map(move |&dimension| ProblemEntry { benchmark, dimension }))
            .collect();
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        if self.workers < 1 {
            return Err(Error::InvalidArgument("workers must be >= 1".into()));
        }
        if self.frameworks.is_empty() {
            return Err(Error::InvalidArgument("no frameworks configured".into()));
        }
        if self.problems.is_empty() {
            return Err(Error::InvalidArgument("no problems configured".into()));
        }
        if let Some(p) = self.problems.iter().find(|p| p.dimension == 0) {
            return Err(Error::InvalidArgument(format!("{} has dimension 0", p.benchmark)));
        }
        let portfolios = self.frameworks.iter().any(|m| matches!(m, Method::Portfolio(_)));
        if portfolios && self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("portfolio frameworks need at least one algorithm".into()));
        }
        Ok(())
    }
}
