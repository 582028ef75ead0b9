//! Initial designs and duplicate-point handling.

use crate::database::{euclidean, Database, DUPLICATE_TOLERANCE};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::rng::SeededRng;

/// Relative magnitude of the jitter applied to duplicate proposals.
pub const DUPLICATE_JITTER: f64 = 1e-8;

/// Latin hypercube design: every coordinate's `count` values fall into
/// distinct equal-width strata, with a uniform jitter inside each stratum.
pub fn latin_hypercube_init(spec: &ProblemSpec, count: usize, rng: &mut SeededRng) -> Result<Vec<Vec<f64>>> {
    if count < 1 {
        return Err(Error::InvalidArgument("latin hypercube needs count >= 1".into()));
    }
    spec.validate()?;
    let d = spec.dimension();
    let mut points = vec![vec![0.0; d]; count];
    for j in 0..d {
        let perm = rng.permutation(count);
        for (i, p) in points.iter_mut().enumerate() {
            let u = (perm[i] as f64 + rng.uniform()) / count as f64;
            p[j] = (spec.lower[j] + u * spec.width(j)).min(spec.upper[j]);
        }
    }
    Ok(points)
}

/// Nudge `point` off any archived point (or any of `pending`) by uniform noise
/// of magnitude `1e-8 * width` per coordinate. Returns whether it was moved.
pub fn separate_from_archive(
    spec: &ProblemSpec,
    point: &mut [f64],
    db: &Database,
    pending: &[Vec<f64>],
    rng: &mut SeededRng,
) -> bool {
    let clashes = |p: &[f64]| db.contains_point(p) || pending.iter().any(|q| euclidean(q, p) <= DUPLICATE_TOLERANCE);
    let mut moved = false;
    // one jitter is ~1e4 times the tolerance, so retries almost never happen
    for _ in 0..16 {
        if !clashes(point) {
            break;
        }
        for (i, v) in point.iter_mut().enumerate() {
            let mag = DUPLICATE_JITTER * spec.width(i);
            *v += rng.uniform_range(-mag, mag);
        }
        spec.clamp(point);
        moved = true;
    }
    moved
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::BenchmarkId;

    fn stratum(v: f64, lo: f64, hi: f64, count: usize) -> usize {
        (((v - lo) / (hi - lo)) * count as f64).floor().min(count as f64 - 1.0) as usize
    }

    #[test]
    fn one_dimension_two_points_split_halves() {
        let spec = ProblemSpec::new(BenchmarkId::Sphere, vec![0.0], vec![1.0], vec![0.5]).unwrap();
        let mut rng = SeededRng::new(11);
        let pts = latin_hypercube_init(&spec, 2, &mut rng).unwrap();
        let mut xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert!(xs[0] >= 0.0 && xs[0] < 0.5);
        assert!(xs[1] >= 0.5 && xs[1] <= 1.0);
    }

    #[test]
    fn two_dimensions_hit_distinct_quarters() {
        let spec = ProblemSpec::new(BenchmarkId::Sphere, vec![-1.0; 2], vec![1.0; 2], vec![0.0; 2]).unwrap();
        let mut rng = SeededRng::new(5);
        let pts = latin_hypercube_init(&spec, 4, &mut rng).unwrap();
        for j in 0..2 {
            let mut s: Vec<usize> = pts.iter().map(|p| stratum(p[j], -1.0, 1.0, 4)).collect();
            s.sort_unstable();
            assert_eq!(s, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let spec = ProblemSpec::new(BenchmarkId::Sphere, vec![-5.0; 10], vec![5.0; 10], vec![0.0; 10]).unwrap();
        let a = latin_hypercube_init(&spec, 20, &mut SeededRng::new(7)).unwrap();
        let b = latin_hypercube_init(&spec, 20, &mut SeededRng::new(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_zero_count() {
        let spec = ProblemSpec::new(BenchmarkId::Sphere, vec![0.0], vec![1.0], vec![0.5]).unwrap();
        assert!(latin_hypercube_init(&spec, 0, &mut SeededRng::new(1)).is_err());
    }

    #[test]
    fn duplicate_proposal_is_moved_off_archive() {
        let spec = ProblemSpec::new(BenchmarkId::Sphere, vec![0.0; 2], vec![1.0; 2], vec![0.5; 2]).unwrap();
        let mut db = Database::new();
        db.insert(&spec, vec![0.3, 0.3], 1.0, None).unwrap();
        let mut p = vec![0.3, 0.3];
        let moved = separate_from_archive(&spec, &mut p, &db, &[], &mut SeededRng::new(2));
        assert!(moved);
        let d = db.nearest_distance(&p).unwrap();
        assert!(d > DUPLICATE_TOLERANCE && d < 1e-7);

        let mut q = vec![0.9, 0.9];
        assert!(!separate_from_archive(&spec, &mut q, &db, &[], &mut SeededRng::new(2)));
        assert_eq!(q, vec![0.9, 0.9]);
    }
}
