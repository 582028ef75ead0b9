//! The append-only archive of truly evaluated samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Two points closer than this (Euclidean) are considered the same point.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub point: Vec<f64>,
    pub fitness: f64,
    /// 1-based order of true evaluation.
    pub evaluation_index: usize,
    pub proposer: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Database {
    samples: Vec<Sample>,
    duplicates: Vec<usize>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Evaluation indices of samples that landed on an already archived point.
    pub fn flagged_duplicates(&self) -> &[usize] {
        &self.duplicates
    }

    pub fn fitness_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.fitness).collect()
    }

    /// Append a truly evaluated point. Returns the assigned evaluation index.
    pub fn insert(&mut self, spec: &ProblemSpec, point: Vec<f64>, fitness: f64, proposer: Option<String>) -> Result<usize> {
        if !fitness.is_finite() {
            return Err(Error::NonFiniteFitness(fitness));
        }
        spec.check_point(&point)?;
        let index = self.samples.last().map_or(1, |s| s.evaluation_index + 1);
        if self.nearest_distance(&point).is_some_and(|d| d <= DUPLICATE_TOLERANCE) {
            self.duplicates.push(index);
        }
        self.samples.push(Sample {
            point,
            fitness,
            evaluation_index: index,
            proposer,
        });
        Ok(index)
    }

    /// Minimal fitness; ties go to the earliest evaluation.
    pub fn best(&self) -> Result<&Sample> {
        let mut best: Option<&Sample> = None;
        for s in &self.samples {
            match best {
                Some(b) if s.fitness >= b.fitness => {}
                _ => best = Some(s),
            }
        }
        best.ok_or(Error::EmptyDatabase)
    }

    pub fn best_fitness(&self) -> Result<f64> {
        self.best().map(|s| s.fitness)
    }

    /// Samples sorted best to worst (stable on evaluation order).
    pub fn sorted_by_fitness(&self) -> Vec<&Sample> {
        let mut v: Vec<&Sample> = self.samples.iter().collect();
        v.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
        v
    }

    pub fn nearest_distance(&self, x: &[f64]) -> Option<f64> {
        self.samples
            .iter()
            .map(|s| euclidean(&s.point, x))
            .min_by(|a, b| a.total_cmp(b))
    }

    /// Index (into `samples()`) of the archived point nearest to `x`.
    pub fn nearest_index(&self, x: &[f64]) -> Option<usize> {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, s)| (i, euclidean(&s.point, x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        self.nearest_distance(x).is_some_and(|d| d <= DUPLICATE_TOLERANCE)
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
