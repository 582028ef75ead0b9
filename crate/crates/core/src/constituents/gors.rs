use serde::{Deserialize, Serialize};

use super::{improved, require_initialized, Constituent, ProposalBatch};
use crate::database::{Database, Sample};
use crate::error::Result;
use crate::problem::ProblemSpec;
use crate::rng::SeededRng;
use crate::sampling::separate_from_archive;
use crate::surrogate::{fit_rbf, RbfModel};

/// Non-improving notifications tolerated before the swarm restarts.
pub const RESTART_PATIENCE: usize = 5;
/// Social influence factor; the mean-attractor weight is `BETA * d / m`.
const BETA: f64 = 0.01;
/// Spread of restarted particles around archived samples, relative to width.
const RESTART_SIGMA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Swarm {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

/// Social-learning PSO on the RBF surrogate with a stall-triggered restart.
///
/// Each `propose` runs one swarm generation on the surrogate and nominates the
/// non-archived particle with the lowest predicted value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GorsSslpso {
    pub swarm: Option<Swarm>,
    pub stall: usize,
    pub restart_pending: bool,
    pub restarts: usize,
}

impl GorsSslpso {
    fn swarm_size(spec: &ProblemSpec, db: &Database) -> usize {
        (2 * spec.dimension()).min(db.len()).max(2)
    }

    fn seed_from_best(spec: &ProblemSpec, db: &Database) -> Swarm {
        let m = Self::swarm_size(spec, db);
        let positions: Vec<Vec<f64>> = db.sorted_by_fitness().into_iter().take(m).map(|s| s.point.clone()).collect();
        let velocities = vec![vec![0.0; spec.dimension()]; positions.len()];
        Swarm { positions, velocities }
    }

    fn seed_around_random(spec: &ProblemSpec, db: &Database, rng: &mut SeededRng) -> Swarm {
        let m = Self::swarm_size(spec, db);
        let positions = (0..m)
            .map(|_| {
                let anchor = &db.samples()[rng.index(db.len())].point;
                let mut x: Vec<f64> = anchor
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a + RESTART_SIGMA * spec.width(j) * rng.normal())
                    .collect();
                spec.clamp(&mut x);
                x
            })
            .collect();
        Swarm {
            positions,
            velocities: vec![vec![0.0; spec.dimension()]; m],
        }
    }

    /// One social-learning generation: every particle but the best learns,
    /// per dimension, from a random better particle and the swarm mean.
    fn step(swarm: &mut Swarm, spec: &ProblemSpec, model: &RbfModel, rng: &mut SeededRng) {
        let m = swarm.positions.len();
        let d = spec.dimension();
        let fitness: Vec<f64> = swarm.positions.iter().map(|x| model.predict_unchecked(x)).collect();
        // order[0] is the best particle
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));
        let mean: Vec<f64> = (0..d)
            .map(|j| swarm.positions.iter().map(|x| x[j]).sum::<f64>() / m as f64)
            .collect();
        let eps = BETA * d as f64 / m as f64;
        let old = swarm.positions.clone();
        for rank in 1..m {
            let i = order[rank];
            for j in 0..d {
                let teacher = order[rng.index(rank)];
                let (r1, r2, r3) = (rng.uniform(), rng.uniform(), rng.uniform());
                let v = r1 * swarm.velocities[i][j] + r2 * (old[teacher][j] - old[i][j]) + r3 * eps * (mean[j] - old[i][j]);
                swarm.velocities[i][j] = v;
                swarm.positions[i][j] = (old[i][j] + v).clamp(spec.lower[j], spec.upper[j]);
            }
        }
    }
}

impl Constituent for GorsSslpso {
    fn name(&self) -> &str {
        "gors-sslpso"
    }

    fn propose(&mut self, spec: &ProblemSpec, db: &Database, rng: &mut SeededRng) -> Result<ProposalBatch> {
        require_initialized(spec, db)?;
        let model = fit_rbf(db.samples(), spec)?;
        let mut stage = "swarm";
        if self.restart_pending {
            self.swarm = Some(Self::seed_around_random(spec, db, rng));
            self.restart_pending = false;
            self.restarts += 1;
            stage = "restart";
        }
        let swarm = self.swarm.get_or_insert_with(|| Self::seed_from_best(spec, db));
        Self::step(swarm, spec, &model, rng);

        let candidate = swarm
            .positions
            .iter()
            .filter(|x| !db.contains_point(x))
            .map(|x| (x, model.predict_unchecked(x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(x, _)| x.clone());
        let mut x = match candidate {
            Some(x) => x,
            None => swarm
                .positions
                .iter()
                .min_by(|a, b| model.predict_unchecked(a).total_cmp(&model.predict_unchecked(b)))
                .expect("non-empty swarm")
                .clone(),
        };
        separate_from_archive(spec, &mut x, db, &[], rng);
        Ok(ProposalBatch::new(self.name(), vec![x], Some(stage)))
    }

    fn notify(&mut self, db: &Database, evaluated: &[Sample]) {
        if evaluated.is_empty() {
            return;
        }
        if improved(db, evaluated, 0.0) {
            self.stall = 0;
            return;
        }
        self.stall += 1;
        if self.stall >= RESTART_PATIENCE {
            self.restart_pending = true;
            self.stall = 0;
        }
    }
}
