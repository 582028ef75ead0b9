use serde::{Deserialize, Serialize};

use super::de::{self, DeSettings};
use super::{improved, require_initialized, Constituent, ProposalBatch};
use crate::database::{Database, Sample};
use crate::error::Result;
use crate::problem::ProblemSpec;
use crate::rng::SeededRng;
use crate::sampling::separate_from_archive;
use crate::surrogate::fit_rbf;

/// Consecutive non-improving generations before the stage flips.
pub const STAGNATION_LIMIT: usize = 3;
/// Relative improvement below which a generation counts as stagnant.
pub const IMPROVEMENT_TOLERANCE: f64 = 1e-6;
/// Monte Carlo candidates per dimension for the exploration and Voronoi steps.
const CANDIDATES_PER_DIM: usize = 100;
/// Fallback perturbation, as a fraction of each coordinate's width.
const FALLBACK_SIGMA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Global,
    Local,
}

impl Stage {
    pub fn tag(self) -> &'static str {
        match self {
            Stage::Global => "global",
            Stage::Local => "local",
        }
    }
}

/// Voronoi-based two-stage SAEA.
///
/// The global stage nominates two points per generation: the surrogate
/// minimizer and the candidate farthest from the archive. The local stage
/// searches the Voronoi cell of the current best sample. Stagnation for
/// [`STAGNATION_LIMIT`] generations toggles the stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Vesaea {
    pub stage: Stage,
    pub stagnation: usize,
    pub optimizer: DeSettings,
}

impl Default for Vesaea {
    fn default() -> Self {
        Self {
            stage: Stage::Global,
            stagnation: 0,
            optimizer: DeSettings::default(),
        }
    }
}

impl Vesaea {
    fn propose_global(&self, spec: &ProblemSpec, db: &Database, rng: &mut SeededRng) -> Result<Vec<Vec<f64>>> {
        let model = fit_rbf(db.samples(), spec)?;
        let seeds = vec![db.best()?.point.clone()];
        let (mut exploit, _) = de::minimize(spec, &self.optimizer, &seeds, rng, |x| model.predict_unchecked(x));
        separate_from_archive(spec, &mut exploit, db, &[], rng);

        let d = spec.dimension();
        let unit_dist = |a: &[f64], b: &[f64]| -> f64 {
            (0..d).map(|j| ((a[j] - b[j]) / spec.width(j)).powi(2)).sum::<f64>()
        };
        let mut explore = Vec::new();
        let mut best_gap = f64::NEG_INFINITY;
        for _ in 0..CANDIDATES_PER_DIM * d {
            let c = uniform_point(spec, rng);
            let gap = db
                .samples()
                .iter()
                .map(|s| unit_dist(&s.point, &c))
                .chain(std::iter::once(unit_dist(&exploit, &c)))
                .fold(f64::INFINITY, f64::min);
            if gap > best_gap {
                best_gap = gap;
                explore = c;
            }
        }
        separate_from_archive(spec, &mut explore, db, std::slice::from_ref(&exploit), rng);
        Ok(vec![exploit, explore])
    }

    fn propose_local(&self, spec: &ProblemSpec, db: &Database, rng: &mut SeededRng) -> Result<Vec<f64>> {
        let model = fit_rbf(db.samples(), spec)?;
        let best = db.best()?;
        let best_pos = db
            .samples()
            .iter()
            .position(|s| s.evaluation_index == best.evaluation_index)
            .expect("best is archived");
        let d = spec.dimension();
        let mut chosen: Option<(Vec<f64>, f64)> = None;
        for _ in 0..CANDIDATES_PER_DIM * d {
            let c = uniform_point(spec, rng);
            if db.nearest_index(&c) != Some(best_pos) {
                continue;
            }
            let v = model.predict_unchecked(&c);
            if chosen.as_ref().is_none_or(|(_, bv)| v < *bv) {
                chosen = Some((c, v));
            }
        }
        let mut x = match chosen {
            Some((c, _)) => c,
            None => {
                let mut x: Vec<f64> = (0..d)
                    .map(|j| best.point[j] + FALLBACK_SIGMA * spec.width(j) * rng.normal())
                    .collect();
                spec.clamp(&mut x);
                x
            }
        };
        separate_from_archive(spec, &mut x, db, &[], rng);
        Ok(x)
    }
}

fn uniform_point(spec: &ProblemSpec, rng: &mut SeededRng) -> Vec<f64> {
    (0..spec.dimension())
        .map(|j| rng.uniform_range(spec.lower[j], spec.upper[j]))
        .collect()
}

impl Constituent for Vesaea {
    fn name(&self) -> &str {
        "vesaea"
    }

    fn propose(&mut self, spec: &ProblemSpec, db: &Database, rng: &mut SeededRng) -> Result<ProposalBatch> {
        require_initialized(spec, db)?;
        let points = match self.stage {
            Stage::Global => self.propose_global(spec, db, rng)?,
            Stage::Local => vec![self.propose_local(spec, db, rng)?],
        };
        Ok(ProposalBatch::new(self.name(), points, Some(self.stage.tag())))
    }

    fn notify(&mut self, db: &Database, evaluated: &[Sample]) {
        if evaluated.is_empty() {
            return;
        }
        if improved(db, evaluated, IMPROVEMENT_TOLERANCE) {
            self.stagnation = 0;
            return;
        }
        self.stagnation += 1;
        if self.stagnation >= STAGNATION_LIMIT {
            self.stage = match self.stage {
                Stage::Global => Stage::Local,
                Stage::Local => Stage::Global,
            };
            self.stagnation = 0;
        }
    }
}
