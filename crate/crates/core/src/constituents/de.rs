//! Differential evolution (rand/1/bin) used to optimize acquisition surfaces.

use crate::problem::ProblemSpec;
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeSettings {
    /// Population size per problem dimension.
    pub population_per_dim: usize,
    pub generations: usize,
    pub differential_weight: f64,
    pub crossover_rate: f64,
}

impl Default for DeSettings {
    fn default() -> Self {
        Self {
            population_per_dim: 10,
            generations: 50,
            differential_weight: 0.5,
            crossover_rate: 0.9,
        }
    }
}

/// Minimize `f` over the box of `spec`. `seeds` are injected into the initial
/// population ahead of the uniform draws. Returns the best point and value.
pub fn minimize<F>(spec: &ProblemSpec, settings: &DeSettings, seeds: &[Vec<f64>], rng: &mut SeededRng, mut f: F) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let d = spec.dimension();
    let np = (settings.population_per_dim * d).max(4);
    let mut pop: Vec<Vec<f64>> = seeds.iter().take(np).cloned().collect();
    while pop.len() < np {
        pop.push((0..d).map(|j| rng.uniform_range(spec.lower[j], spec.upper[j])).collect());
    }
    let mut fit: Vec<f64> = pop.iter().map(|x| sanitize(f(x))).collect();

    let mut trial = vec![0.0; d];
    for _ in 0..settings.generations {
        for i in 0..np {
            let (a, b, c) = distinct_three(np, i, rng);
            let forced = rng.index(d);
            for j in 0..d {
                trial[j] = if j == forced || rng.uniform() < settings.crossover_rate {
                    let v = pop[a][j] + settings.differential_weight * (pop[b][j] - pop[c][j]);
                    // bounce back between the base vector and the violated bound
                    if v < spec.lower[j] {
                        spec.lower[j] + rng.uniform() * (pop[a][j] - spec.lower[j])
                    } else if v > spec.upper[j] {
                        spec.upper[j] - rng.uniform() * (spec.upper[j] - pop[a][j])
                    } else {
                        v
                    }
                } else {
                    pop[i][j]
                };
            }
            let ft = sanitize(f(&trial));
            if ft <= fit[i] {
                pop[i].copy_from_slice(&trial);
                fit[i] = ft;
            }
        }
    }
    let best = (0..np).min_by(|&a, &b| fit[a].total_cmp(&fit[b])).expect("non-empty population");
    (pop[best].clone(), fit[best])
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn distinct_three(np: usize, exclude: usize, rng: &mut SeededRng) -> (usize, usize, usize) {
    let mut pick = |taken: &[usize]| loop {
        let k = rng.index(np);
        if !taken.contains(&k) {
            return k;
        }
    };
    let a = pick(&[exclude]);
    let b = pick(&[exclude, a]);
    let c = pick(&[exclude, a, b]);
    (a, b, c)
}
