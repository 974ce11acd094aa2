//! Stochastic multi-gradient steps.

mod minnorm;

pub use minnorm::{kkt_residual, solve_minnorm, SimplexWeights, KKT_TOLERANCE};

use serde::{Deserialize, Serialize};

use crate::data::{sample_batch, BatchSchedule};
use crate::error::{Error, Result};
use crate::problem::MultiObjective;
use crate::rng::Rng;

/// Piecewise-constant step sizes `alpha0 * decay_factor^floor(k / decay_period)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSchedule {
    pub alpha0: f64,
    pub decay_factor: f64,
    pub decay_period: usize,
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule {
            alpha0: 2.1,
            decay_factor: 1.0 / 3.0,
            decay_period: 500,
        }
    }
}

impl StepSchedule {
    pub fn constant(alpha: f64) -> Self {
        StepSchedule {
            alpha0: alpha,
            decay_factor: 1.0,
            decay_period: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0) || !self.alpha0.is_finite() {
            return Err(Error::invalid("alpha0 must be positive"));
        }
        if !(self.decay_factor > 0.0 && self.decay_factor <= 1.0) {
            return Err(Error::invalid("step decay factor must be in (0, 1]"));
        }
        if self.decay_period == 0 {
            return Err(Error::invalid("step decay period must be >= 1"));
        }
        Ok(())
    }

    pub fn alpha(&self, k: usize) -> f64 {
        let epochs = (k / self.decay_period) as i32;
        self.alpha0 * self.decay_factor.powi(epochs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SmgConfig {
    pub step: StepSchedule,
    pub batch: BatchSchedule,
    /// Use exact gradients even for finite-sum problems.
    pub full_batch: bool,
}

impl SmgConfig {
    pub fn validate(&self, objectives: usize) -> Result<()> {
        self.step.validate()?;
        self.batch.validate(objectives)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub x: Vec<f64>,
    pub weights: SimplexWeights,
    /// Norm of the combined direction before scaling by the step size.
    pub direction_norm: f64,
    pub grad_evals: u64,
}

/// One SMG step from `x` at lineage iterate `k`.
///
/// Each objective gets its own independently drawn batch.
pub fn smg_step<P: MultiObjective + ?Sized>(
    problem: &P,
    x: &[f64],
    config: &SmgConfig,
    k: usize,
    rng: &mut Rng,
) -> Result<StepOutcome> {
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            got: x.len(),
        });
    }
    let m = problem.num_objectives();
    let mut grads = Vec::with_capacity(m);
    let mut evals = 0u64;
    for i in 0..m {
        let g = match problem.num_samples() {
            Some(n) if !config.full_batch => {
                let batch = sample_batch(n, &config.batch, i, k, rng);
                evals += batch.len() as u64;
                problem.gradient(i, x, Some(&batch))?
            }
            Some(n) => {
                evals += n as u64;
                problem.gradient(i, x, None)?
            }
            None => {
                evals += 1;
                problem.gradient(i, x, None)?
            }
        };
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { iteration: k });
        }
        grads.push(g);
    }
    let weights = solve_minnorm(&grads)?;
    let direction = weights.combine(&grads);
    let alpha = config.step.alpha(k);
    let next: Vec<f64> = x
        .iter()
        .zip(&direction)
        .map(|(xi, d)| xi - alpha * d)
        .collect();
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { iteration: k });
    }
    Ok(StepOutcome {
        x: next,
        weights,
        direction_norm: direction.iter().map(|v| v * v).sum::<f64>().sqrt(),
        grad_evals: evals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub grad_evals: u64,
    pub last_weights: Option<SimplexWeights>,
}

/// `iterations` consecutive SMG steps, the first at lineage iterate `k0`.
pub fn smg_run<P: MultiObjective + ?Sized>(
    problem: &P,
    x0: &[f64],
    config: &SmgConfig,
    k0: usize,
    iterations: usize,
    rng: &mut Rng,
) -> Result<RunOutcome> {
    let mut x = x0.to_vec();
    let mut grad_evals = 0;
    let mut last_weights = None;
    for j in 0..iterations {
        let out = smg_step(problem, &x, config, k0 + j, rng)?;
        x = out.x;
        grad_evals += out.grad_evals;
        last_weights = Some(out.weights);
    }
    Ok(RunOutcome {
        x,
        iterations,
        grad_evals,
        last_weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    /// f1 = |x - e1|^2, f2 = |x + e1|^2
    struct Toy;

    impl MultiObjective for Toy {
        fn num_objectives(&self) -> usize {
            2
        }
        fn dim(&self) -> usize {
            2
        }
        fn num_samples(&self) -> Option<usize> {
            None
        }
        fn values(&self, x: &[f64]) -> Result<Vec<f64>> {
            let a = (x[0] - 1.0).powi(2) + x[1] * x[1];
            let b = (x[0] + 1.0).powi(2) + x[1] * x[1];
            Ok(vec![a, b])
        }
        fn gradient(&self, i: usize, x: &[f64], _: Option<&[usize]>) -> Result<Vec<f64>> {
            let s = if i == 0 { -1.0 } else { 1.0 };
            Ok(vec![2.0 * (x[0] + s), 2.0 * x[1]])
        }
    }

    #[test]
    fn step_schedule_decays_per_period() {
        let s = StepSchedule::default();
        assert_eq!(s.alpha(0), 2.1);
        assert_eq!(s.alpha(499), 2.1);
        assert!((s.alpha(500) - 0.7).abs() < 1e-15);
        assert!((s.alpha(1000) - 2.1 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn half_step_projects_onto_the_segment() {
        let cfg = SmgConfig {
            step: StepSchedule::constant(0.5),
            ..SmgConfig::default()
        };
        let out = smg_step(&Toy, &[0.3, 2.0], &cfg, 0, &mut rng::seeded(0)).unwrap();
        assert!((out.x[0] - 0.3).abs() < 1e-15);
        assert_eq!(out.x[1], 0.0);
        assert_eq!(out.grad_evals, 2);
    }

    #[test]
    fn pareto_stationary_points_stay_put() {
        let cfg = SmgConfig::default();
        let out = smg_step(&Toy, &[0.25, 0.0], &cfg, 0, &mut rng::seeded(0)).unwrap();
        assert_eq!(out.x, vec![0.25, 0.0]);
        assert_eq!(out.direction_norm, 0.0);
    }

    #[test]
    fn run_descends_both_objectives() {
        let cfg = SmgConfig {
            step: StepSchedule::constant(0.1),
            ..SmgConfig::default()
        };
        let x0 = [3.0, 1.0];
        let before = Toy.values(&x0).unwrap();
        let out = smg_run(&Toy, &x0, &cfg, 0, 5, &mut rng::seeded(0)).unwrap();
        let after = Toy.values(&out.x).unwrap();
        assert!(after[0] < before[0] && after[1] < before[1]);
        assert_eq!(out.grad_evals, 10);
    }

    #[test]
    fn divergence_is_reported() {
        let cfg = SmgConfig {
            step: StepSchedule::constant(1e308),
            ..SmgConfig::default()
        };
        let err = smg_run(&Toy, &[1e10, 1e10], &cfg, 7, 3, &mut rng::seeded(0)).unwrap_err();
        assert!(matches!(err, Error::NonFinite { iteration: 7 }));
    }

    #[test]
    fn wrong_dimension() {
        let cfg = SmgConfig::default();
        assert!(smg_step(&Toy, &[1.0], &cfg, 0, &mut rng::seeded(0)).is_err());
    }
}
