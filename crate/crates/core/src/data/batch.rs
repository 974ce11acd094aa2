use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Geometrically growing batch sizes: objective `i` at SMG iterate `k` uses
/// `ceil(b0_i * ratio^k)` samples, capped at the dataset size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchSchedule {
    /// One base size per objective, or a single value shared by all.
    pub batch0_per_objective: Vec<usize>,
    pub growth_ratio: f64,
}

impl Default for BatchSchedule {
    fn default() -> Self {
        BatchSchedule {
            batch0_per_objective: vec![80, 50],
            growth_ratio: 1.018,
        }
    }
}

impl BatchSchedule {
    pub fn constant(size: usize) -> Self {
        BatchSchedule {
            batch0_per_objective: vec![size],
            growth_ratio: 1.0,
        }
    }

    pub fn validate(&self, objectives: usize) -> Result<()> {
        let b = &self.batch0_per_objective;
        if b.is_empty() || b.contains(&0) {
            return Err(Error::invalid("base batch sizes must be >= 1"));
        }
        if b.len() != 1 && b.len() != objectives {
            return Err(Error::invalid(format!(
                "{} base batch sizes given for {objectives} objectives",
                b.len()
            )));
        }
        if !(self.growth_ratio >= 1.0) || !self.growth_ratio.is_finite() {
            return Err(Error::invalid("batch growth ratio must be >= 1"));
        }
        Ok(())
    }

    fn base(&self, objective: usize) -> usize {
        let b = &self.batch0_per_objective;
        if b.len() == 1 {
            b[0]
        } else {
            b[objective]
        }
    }

    pub fn size(&self, objective: usize, k: usize, n: usize) -> usize {
        let raw = (self.base(objective) as f64 * self.growth_ratio.powf(k as f64)).ceil();
        if raw >= n as f64 {
            n
        } else {
            raw as usize
        }
    }
}

/// Batch of indices into a dataset of `n` samples, drawn uniformly with
/// replacement.
pub fn sample_batch(
    n: usize,
    schedule: &BatchSchedule,
    objective: usize,
    k: usize,
    rng: &mut Rng,
) -> Vec<usize> {
    let size = schedule.size(objective, k, n);
    (0..size).map(|_| rng.random_range(0..n)).collect()
}
