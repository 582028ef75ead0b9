use super::de::{self, DeSettings};
use super::{require_initialized, Constituent, ProposalBatch};
use crate::database::{Database, Sample};
use crate::error::Result;
use crate::problem::ProblemSpec;
use crate::rng::SeededRng;
use crate::sampling::separate_from_archive;
use crate::surrogate::{fit_gp, lcb};

pub const DEFAULT_KAPPA: f64 = 2.0;

/// Efficient global optimization with a lower-confidence-bound acquisition.
/// Stateless apart from its settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoLcb {
    pub kappa: f64,
    pub optimizer: DeSettings,
}

impl Default for EgoLcb {
    fn default() -> Self {
        Self {
            kappa: DEFAULT_KAPPA,
            optimizer: DeSettings::default(),
        }
    }
}

impl Constituent for EgoLcb {
    fn name(&self) -> &str {
        "ego-lcb"
    }

    fn propose(&mut self, spec: &ProblemSpec, db: &Database, rng: &mut SeededRng) -> Result<ProposalBatch> {
        require_initialized(spec, db)?;
        let model = fit_gp(db.samples(), spec)?;
        let seeds = vec![db.best()?.point.clone()];
        let (mut x, _) = de::minimize(spec, &self.optimizer, &seeds, rng, |x| {
            lcb(&model, x, self.kappa).unwrap_or(f64::INFINITY)
        });
        separate_from_archive(spec, &mut x, db, &[], rng);
        Ok(ProposalBatch::new(self.name(), vec![x], None))
    }

    fn notify(&mut self, _db: &Database, _evaluated: &[Sample]) {}
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::BenchmarkId;
    use crate::constituents::testutil::initialized;

    #[test]
    fn proposes_single_lcb_minimizer() {
        let (spec, db) = initialized(BenchmarkId::Sphere, 3, 4);
        let mut ego = EgoLcb::default();
        let batch = ego.propose(&spec, &db, &mut SeededRng::new(1)).unwrap();
        assert_eq!(batch.points.len(), 1);
        let x = &batch.points[0];
        assert!(spec.contains(x));
        assert!(!db.contains_point(x));

        // no random probe beats the proposal on the acquisition surface
        let model = fit_gp(db.samples(), &spec).unwrap();
        let at = lcb(&model, x, DEFAULT_KAPPA).unwrap();
        let mut rng = SeededRng::new(77);
        for _ in 0..500 {
            let probe: Vec<f64> = (0..3).map(|j| rng.uniform_range(spec.lower[j], spec.upper[j])).collect();
            assert!(lcb(&model, &probe, DEFAULT_KAPPA).unwrap() >= at - 1e-6 * (1.0 + at.abs()));
        }
    }

    #[test]
    fn notify_leaves_state_unchanged() {
        let (_, db) = initialized(BenchmarkId::Ackley, 2, 1);
        let mut ego = EgoLcb::default();
        let before = ego.clone();
        ego.notify(&db, &db.samples()[..1]);
        assert_eq!(ego, before);
    }

    #[test]
    fn propose_is_pure_given_seed() {
        let (spec, db) = initialized(BenchmarkId::Griewank, 2, 8);
        let a = EgoLcb::default().propose(&spec, &db, &mut SeededRng::new(5)).unwrap();
        let b = EgoLcb::default().propose(&spec, &db, &mut SeededRng::new(5)).unwrap();
        assert_eq!(a, b);
    }
}
