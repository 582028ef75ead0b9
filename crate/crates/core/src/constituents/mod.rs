//! Individual-based SAEAs. Each one looks at the shared archive and nominates
//! one or two points for true evaluation; none of them ever evaluates the
//! objective itself.

pub mod de;
mod ego;
mod gors;
mod vesaea;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use ego::EgoLcb;
pub use gors::{GorsSslpso, RESTART_PATIENCE};
pub use vesaea::{Stage, Vesaea, STAGNATION_LIMIT};

use crate::database::{Database, Sample};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstituentId {
    #[serde(rename = "ego-lcb")]
    EgoLcb,
    #[serde(rename = "vesaea")]
    Vesaea,
    #[serde(rename = "gors-sslpso")]
    GorsSslpso,
}

impl ConstituentId {
    pub const ALL: [ConstituentId; 3] = [ConstituentId::EgoLcb, ConstituentId::Vesaea, ConstituentId::GorsSslpso];

    pub fn name(self) -> &'static str {
        match self {
            ConstituentId::EgoLcb => "ego-lcb",
            ConstituentId::Vesaea => "vesaea",
            ConstituentId::GorsSslpso => "gors-sslpso",
        }
    }

    /// Fresh constituent in its initial state.
    pub fn build(self) -> Box<dyn Constituent> {
        match self {
            ConstituentId::EgoLcb => Box::new(EgoLcb::default()),
            ConstituentId::Vesaea => Box::new(Vesaea::default()),
            ConstituentId::GorsSslpso => Box::new(GorsSslpso::default()),
        }
    }
}

impl fmt::Display for ConstituentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstituentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstituentId::ALL
            .into_iter()
            .find(|c| c.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// The points one constituent nominates in one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalBatch {
    pub points: Vec<Vec<f64>>,
    pub proposer: String,
    pub stage: Option<String>,
}

impl ProposalBatch {
    pub fn new(proposer: &str, points: Vec<Vec<f64>>, stage: Option<&str>) -> Self {
        Self {
            points,
            proposer: proposer.to_string(),
            stage: stage.map(str::to_string),
        }
    }
}

/// A member algorithm of a portfolio.
pub trait Constituent: Send {
    fn name(&self) -> &str;

    /// Nominate 1-2 in-domain points, none on an archived point.
    fn propose(&mut self, spec: &ProblemSpec, db: &Database, rng: &mut SeededRng) -> Result<ProposalBatch>;

    /// Observe freshly evaluated samples (already inserted into `db`).
    fn notify(&mut self, db: &Database, evaluated: &[Sample]);
}

pub(crate) fn require_initialized(spec: &ProblemSpec, db: &Database) -> Result<()> {
    let need = 2 * spec.dimension();
    if db.len() < need {
        return Err(Error::DatabaseTooSmall { need, have: db.len() });
    }
    Ok(())
}

/// Whether `evaluated` improved on the best fitness archived before them by
/// more than `rel_tol` (relative).
pub(crate) fn improved(db: &Database, evaluated: &[Sample], rel_tol: f64) -> bool {
    let Some(first_new) = evaluated.iter().map(|s| s.evaluation_index).min() else {
        return false;
    };
    let prior = db
        .samples()
        .iter()
        .filter(|s| s.evaluation_index < first_new)
        .map(|s| s.fitness)
        .min_by(f64::total_cmp);
    let new_best = evaluated.iter().map(|s| s.fitness).min_by(f64::total_cmp).expect("non-empty");
    match prior {
        None => true,
        Some(p) => new_best < p - rel_tol * p.abs(),
    }
}
