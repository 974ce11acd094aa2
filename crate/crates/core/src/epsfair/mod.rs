//! The epsilon-constraint baseline: minimize the logistic loss subject to
//! `|cov_k(x)| <= eps` for the decision-boundary covariances of a sensitive
//! attribute, swept over evenly spaced thresholds.
//!
//! The covariances are linear in the parameters, so each threshold is a
//! smooth convex program with linear inequality constraints, solved by an
//! augmented-Lagrangian loop around L-BFGS.

mod lbfgs;

pub use lbfgs::{minimize, Minimum};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::objectives::{
    covariance_direction, logistic_grad, logistic_loss, BoundObjectives, Objective,
};
use crate::pfsmg::{filter_nondominated, FrontPoint, ParetoFront};
use crate::problem::MultiObjective;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpsSweepConfig {
    pub n_thresholds: usize,
    /// Gradient-norm target for the unconstrained fit.
    pub tolerance: f64,
    /// Allowed constraint violation `|cov| - eps`.
    pub feasibility_tolerance: f64,
    /// Allowed norm of the Lagrangian gradient.
    pub stationarity_tolerance: f64,
    /// L-BFGS iteration cap per subproblem.
    pub max_iterations: usize,
    pub max_outer_iterations: usize,
    pub penalty0: f64,
    pub penalty_growth: f64,
}

impl Default for EpsSweepConfig {
    fn default() -> Self {
        EpsSweepConfig {
            n_thresholds: 100,
            tolerance: 1e-6,
            feasibility_tolerance: 1e-6,
            stationarity_tolerance: 1e-5,
            max_iterations: 10_000,
            max_outer_iterations: 60,
            penalty0: 10.0,
            penalty_growth: 10.0,
        }
    }
}

impl EpsSweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_thresholds < 2 {
            return Err(Error::invalid("epsfair.n_thresholds must be >= 2"));
        }
        for (name, v) in [
            ("tolerance", self.tolerance),
            ("feasibility_tolerance", self.feasibility_tolerance),
            ("stationarity_tolerance", self.stationarity_tolerance),
            ("penalty0", self.penalty0),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("epsfair.{name} must be positive")));
            }
        }
        if !(self.penalty_growth > 1.0) {
            return Err(Error::invalid("epsfair.penalty_growth must exceed 1"));
        }
        if self.max_iterations == 0 || self.max_outer_iterations == 0 {
            return Err(Error::invalid("epsfair iteration caps must be >= 1"));
        }
        Ok(())
    }
}

/// Logistic loss plus the linear covariance functionals of one attribute.
#[derive(Debug, Clone)]
pub struct EpsProblem<'a> {
    data: &'a Dataset,
    lambda_reg: f64,
    /// One gradient `w_k` per constrained category: `cov_k(x) = w_k · x`.
    directions: Vec<Vec<f64>>,
}

impl<'a> EpsProblem<'a> {
    /// Binary attributes get one constraint (the two categories' covariances
    /// are negatives of each other); multi-valued ones get one per category.
    pub fn new(data: &'a Dataset, attribute: usize, lambda_reg: f64) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::invalid("epsfair needs a nonempty dataset"));
        }
        let k = data
            .attributes()
            .get(attribute)
            .ok_or_else(|| Error::invalid(format!("no attribute with index {attribute}")))?
            .cardinality();
        let categories: Vec<usize> = if k == 2 { vec![1] } else { (0..k).collect() };
        let directions = categories
            .into_iter()
            .map(|cat| covariance_direction(data, attribute, cat))
            .collect();
        Ok(EpsProblem {
            data,
            lambda_reg,
            directions,
        })
    }

    pub fn dim(&self) -> usize {
        self.data.feature_dim() + 1
    }

    pub fn covariances(&self, x: &[f64]) -> Vec<f64> {
        self.directions.iter().map(|w| dot(w, x)).collect()
    }

    /// Largest absolute covariance.
    pub fn max_abs_covariance(&self, x: &[f64]) -> f64 {
        self.covariances(x).iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn loss(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (
            logistic_loss(self.data, x, self.lambda_reg, None),
            logistic_grad(self.data, x, self.lambda_reg, None),
        )
    }

    /// Gradient evaluations charged per loss gradient.
    fn cost(&self) -> u64 {
        self.data.len() as u64
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unconstrained {
    pub x: Vec<f64>,
    pub grad_norm: f64,
    pub grad_evals: u64,
}

/// Full-batch minimizer of the loss alone.
pub fn minimize_loss(problem: &EpsProblem, config: &EpsSweepConfig) -> Result<Unconstrained> {
    let x0 = vec![0.0; problem.dim()];
    let m = minimize(
        |x| problem.loss(x),
        &x0,
        config.tolerance,
        config.max_iterations,
    )?;
    Ok(Unconstrained {
        x: m.x,
        grad_norm: m.grad_norm,
        grad_evals: m.evaluations as u64 * problem.cost(),
    })
}

/// Largest absolute covariance at the unconstrained loss minimizer.
pub fn epsilon_upper_bound(problem: &EpsProblem, config: &EpsSweepConfig) -> Result<f64> {
    let u = minimize_loss(problem, config)?;
    Ok(problem.max_abs_covariance(&u.x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedSolution {
    pub x: Vec<f64>,
    /// `max(0, max_k |cov_k| - eps)`.
    pub feasibility: f64,
    /// Norm of the Lagrangian gradient at the final multipliers.
    pub stationarity: f64,
    pub multipliers: Vec<f64>,
    pub outer_iterations: usize,
    pub grad_evals: u64,
}

/// Minimizes the loss subject to `|cov_k(x)| <= eps`, starting from `x0`.
pub fn solve_constrained(
    problem: &EpsProblem,
    eps: f64,
    config: &EpsSweepConfig,
    x0: &[f64],
) -> Result<ConstrainedSolution> {
    if !(eps >= 0.0) {
        return Err(Error::invalid(format!("threshold must be >= 0, got {eps}")));
    }
    if x0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            got: x0.len(),
        });
    }
    // constraints s * w_k · x - eps <= 0 for s = +1, -1
    let constraints: Vec<(f64, &[f64])> = problem
        .directions
        .iter()
        .flat_map(|w| [(1.0, w.as_slice()), (-1.0, w.as_slice())])
        .collect();
    let value = |x: &[f64], i: usize| constraints[i].0 * dot(constraints[i].1, x) - eps;

    let mut nu = vec![0.0; constraints.len()];
    let mut mu = config.penalty0;
    let mut x = x0.to_vec();
    let mut grad_evals = 0u64;
    let mut last_violation = f64::INFINITY;
    let inner_tol = 0.1 * config.stationarity_tolerance;
    let mut feasibility = f64::INFINITY;
    let mut stationarity = f64::INFINITY;

    for outer in 1..=config.max_outer_iterations {
        let augmented = |x: &[f64]| {
            let (mut v, mut g) = problem.loss(x);
            for (i, &(s, w)) in constraints.iter().enumerate() {
                let shifted = nu[i] + mu * value(x, i);
                if shifted > 0.0 {
                    v += (shifted * shifted - nu[i] * nu[i]) / (2.0 * mu);
                    g.iter_mut()
                        .zip(w)
                        .for_each(|(gi, wi)| *gi += shifted * s * wi);
                } else {
                    v -= nu[i] * nu[i] / (2.0 * mu);
                }
            }
            (v, g)
        };
        let inner = match minimize(augmented, &x, inner_tol, config.max_iterations) {
            Ok(m) => m,
            Err(Error::NoConvergence { .. }) => {
                return Err(Error::Stagnation {
                    feasibility,
                    stationarity,
                })
            }
            Err(e) => return Err(e),
        };
        grad_evals += inner.evaluations as u64 * problem.cost();
        x = inner.x;

        for (i, n) in nu.iter_mut().enumerate() {
            *n = (*n + mu * value(&x, i)).max(0.0);
        }
        let violation = (0..constraints.len())
            .map(|i| value(&x, i))
            .fold(0.0, f64::max);
        let (_, mut g) = problem.loss(&x);
        for (i, &(s, w)) in constraints.iter().enumerate() {
            g.iter_mut()
                .zip(w)
                .for_each(|(gi, wi)| *gi += nu[i] * s * wi);
        }
        feasibility = violation;
        stationarity = norm(&g);
        if feasibility <= config.feasibility_tolerance
            && stationarity <= config.stationarity_tolerance
        {
            return Ok(ConstrainedSolution {
                x,
                feasibility,
                stationarity,
                multipliers: nu,
                outer_iterations: outer,
                grad_evals,
            });
        }
        if violation > 0.25 * last_violation {
            mu *= config.penalty_growth;
        }
        last_violation = violation;
    }
    Err(Error::Stagnation {
        feasibility,
        stationarity,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOutcome {
    pub epsilon: f64,
    pub f: Option<Vec<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub front: ParetoFront,
    pub upper_bound: f64,
    /// One entry per threshold, in increasing order of epsilon.
    pub thresholds: Vec<ThresholdOutcome>,
    pub grad_evals: u64,
}

/// The constrained attribute and loss regularization of an objective set
/// `(logistic loss, disparate impact)`.
fn sweep_target(objectives: &BoundObjectives) -> Result<(usize, f64)> {
    let lambda_reg = match objectives.objectives().first() {
        Some(Objective::Logistic { lambda_reg }) => *lambda_reg,
        _ => {
            return Err(Error::invalid(
                "epsfair needs the logistic loss as first objective",
            ))
        }
    };
    let attribute = match objectives.objectives() {
        [_, Objective::DiBinary { attribute }] | [_, Objective::DiMulti { attribute, .. }] => {
            *attribute
        }
        [_, Objective::EqualOppFnr { .. }] => {
            return Err(Error::invalid(
                "epsfair supports only the disparate-impact objectives; \
                 the false-negative covariance is not convex",
            ))
        }
        _ => return Err(Error::invalid("epsfair needs exactly two objectives")),
    };
    Ok((attribute, lambda_reg))
}

/// Solves at `n_thresholds` evenly spaced thresholds in `[0, upper bound]`
/// (in parallel, each started from the unconstrained minimizer), evaluates
/// the objectives at each solution and keeps the nondominated ones. Failed
/// thresholds are skipped.
pub fn sweep_front(objectives: &BoundObjectives, config: &EpsSweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let (attribute, lambda_reg) = sweep_target(objectives)?;
    let problem = EpsProblem::new(objectives.data(), attribute, lambda_reg)?;
    let start = minimize_loss(&problem, config)?;
    let upper_bound = problem.max_abs_covariance(&start.x);
    let n = config.n_thresholds;
    let eps: Vec<f64> = (0..n)
        .map(|t| upper_bound * t as f64 / (n - 1) as f64)
        .collect();

    let solved: Vec<(ThresholdOutcome, Option<FrontPoint>, u64)> = eps
        .par_iter()
        .map(|&e| {
            let result = solve_constrained(&problem, e, config, &start.x)
                .and_then(|s| Ok((objectives.values(&s.x)?, s)));
            match result {
                Ok((f, s)) => {
                    let point = FrontPoint {
                        x: s.x,
                        f: f.clone(),
                        iterate_count: 0,
                    };
                    let outcome = ThresholdOutcome {
                        epsilon: e,
                        f: Some(f),
                        error: None,
                    };
                    (outcome, Some(point), s.grad_evals)
                }
                Err(err) => {
                    log::warn!("epsfair threshold {e}: {err}");
                    let outcome = ThresholdOutcome {
                        epsilon: e,
                        f: None,
                        error: Some(err.to_string()),
                    };
                    (outcome, None, 0)
                }
            }
        })
        .collect();

    let grad_evals = start.grad_evals + solved.iter().map(|s| s.2).sum::<u64>();
    let mut thresholds = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for (outcome, point, _) in solved {
        thresholds.push(outcome);
        points.extend(point);
    }
    if points.is_empty() {
        return Err(Error::invalid("every epsfair threshold failed"));
    }
    let failed = n - points.len();
    if failed > 0 {
        log::warn!("epsfair: {failed} of {n} thresholds failed and were skipped");
    }
    Ok(SweepOutput {
        front: filter_nondominated(points),
        upper_bound,
        thresholds,
        grad_evals,
    })
}
