//! Pareto-front SMG: a list of nondominated points grown by perturbation and
//! short SMG runs, filtered and thinned after every iteration.

mod front;

pub use front::{
    density_thin, dominates, filter_nondominated, nondominated_indices, perturb, FrontPoint,
    ParetoFront,
};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{hypervolume_clipped, reference_point};
use crate::problem::MultiObjective;
use crate::rng;
use crate::smg::{smg_run, SmgConfig};

const INIT_STREAM: u64 = 1;
const PERTURB_STREAM: u64 = 2;
const SMG_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PfsmgConfig {
    pub initial_points: usize,
    /// Perturbed copies added per point and iteration.
    pub perturbations: usize,
    /// SMG runs started from every point per iteration.
    pub runs_per_point: usize,
    /// SMG iterations in each run.
    pub iters_per_run: usize,
    /// Stop once the list holds more points than this.
    pub point_budget: usize,
    /// Stop once some lineage has more SMG iterations than this.
    pub iterate_budget: usize,
    /// Hard cap on outer iterations.
    pub max_iterations: usize,
    pub radius: f64,
    /// Thinning cell edge as a fraction of each objective's range; 0 disables.
    pub cell_fraction: f64,
    pub seed: u64,
    /// Fixed reference for the hypervolume progress log; derived from the
    /// starting list when absent.
    pub reference: Option<Vec<f64>>,
}

impl Default for PfsmgConfig {
    fn default() -> Self {
        PfsmgConfig {
            initial_points: 5,
            perturbations: 2,
            runs_per_point: 3,
            iters_per_run: 2,
            point_budget: 1500,
            iterate_budget: 1000,
            max_iterations: 10_000,
            radius: 0.1,
            cell_fraction: 1.0 / 200.0,
            seed: 0,
            reference: None,
        }
    }
}

impl PfsmgConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("initial_points", self.initial_points),
            ("runs_per_point", self.runs_per_point),
            ("iters_per_run", self.iters_per_run),
            ("point_budget", self.point_budget),
            ("iterate_budget", self.iterate_budget),
            ("max_iterations", self.max_iterations),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::invalid(format!("pfsmg.{name} must be >= 1")));
            }
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::invalid("pfsmg.radius must be positive"));
        }
        if !(0.0..1.0).contains(&self.cell_fraction) {
            return Err(Error::invalid("pfsmg.cell_fraction must be in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    PointBudget,
    IterateBudget,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub points: usize,
    pub max_iterate_count: usize,
    pub hypervolume: Option<f64>,
    pub grad_evals: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfsmgOutput {
    pub front: ParetoFront,
    pub iterations: usize,
    pub grad_evals: u64,
    pub stop: StopReason,
    pub reference: Option<Vec<f64>>,
    pub history: Vec<IterationLog>,
}

/// A run that hit an error; the front as of the last completed iteration is
/// kept.
#[derive(Debug, thiserror::Error)]
#[error("pfsmg stopped in iteration {iteration}: {source}")]
pub struct PfsmgFailure {
    pub iteration: usize,
    pub partial: ParetoFront,
    pub grad_evals: u64,
    #[source]
    pub source: Error,
}

/// Runs PF-SMG from `initial_points` random starting points with standard
/// normal entries.
pub fn pfsmg_run<P: MultiObjective + ?Sized>(
    problem: &P,
    smg: &SmgConfig,
    config: &PfsmgConfig,
) -> std::result::Result<PfsmgOutput, PfsmgFailure> {
    let mut g = rng::stream(config.seed, &[INIT_STREAM]);
    let start: Vec<Vec<f64>> = (0..config.initial_points)
        .map(|_| {
            (0..problem.dim())
                .map(|_| StandardNormal.sample(&mut g))
                .collect()
        })
        .collect();
    pfsmg_run_from(problem, smg, config, start)
}

/// Runs PF-SMG from the given starting points, each with a fresh lineage.
pub fn pfsmg_run_from<P: MultiObjective + ?Sized>(
    problem: &P,
    smg: &SmgConfig,
    config: &PfsmgConfig,
    start: Vec<Vec<f64>>,
) -> std::result::Result<PfsmgOutput, PfsmgFailure> {
    let fail = |iteration, partial: &ParetoFront, grad_evals, source| PfsmgFailure {
        iteration,
        partial: partial.clone(),
        grad_evals,
        source,
    };
    let empty = ParetoFront::default();
    let checked = config
        .validate()
        .and_then(|_| smg.validate(problem.num_objectives()))
        .and_then(|_| {
            if start.is_empty() {
                Err(Error::invalid("pfsmg needs at least one starting point"))
            } else {
                Ok(())
            }
        });
    if let Err(e) = checked {
        return Err(fail(0, &empty, 0, e));
    }
    let initial = match evaluate(problem, start.into_iter().map(|x| (x, 0)).collect()) {
        Ok(p) => p,
        Err(e) => return Err(fail(0, &empty, 0, e)),
    };
    let mut list = filter_nondominated(initial);

    let m = problem.num_objectives();
    let reference = match &config.reference {
        Some(r) if r.len() == m => Some(r.clone()),
        Some(r) => {
            let e = Error::DimensionMismatch {
                expected: m,
                got: r.len(),
            };
            return Err(fail(0, &list, 0, e));
        }
        None if m <= 3 => reference_point(&list.objective_values()).ok(),
        None => None,
    };

    let mut history = Vec::new();
    let mut grad_evals = 0u64;
    let mut iteration = 0;
    let stop = loop {
        if iteration == config.max_iterations {
            break StopReason::MaxIterations;
        }
        iteration += 1;
        match step(problem, smg, config, &list, iteration) {
            Ok((next, evals)) => {
                list = next;
                grad_evals += evals;
            }
            Err(e) => return Err(fail(iteration, &list, grad_evals, e)),
        }

        let max_iterate_count = list
            .points()
            .iter()
            .map(|p| p.iterate_count)
            .max()
            .unwrap_or(0);
        let hv = reference
            .as_ref()
            .and_then(|r| hypervolume_clipped(&list.objective_values(), r).ok());
        log::info!(
            "pfsmg iteration {iteration}: {} points, hypervolume {}",
            list.len(),
            hv.map_or("n/a".to_string(), |v| v.to_string())
        );
        history.push(IterationLog {
            iteration,
            points: list.len(),
            max_iterate_count,
            hypervolume: hv,
            grad_evals,
        });

        if list.len() > config.point_budget {
            break StopReason::PointBudget;
        }
        if max_iterate_count > config.iterate_budget {
            break StopReason::IterateBudget;
        }
    };

    Ok(PfsmgOutput {
        front: list,
        iterations: iteration,
        grad_evals,
        stop,
        reference,
        history,
    })
}

fn evaluate<P: MultiObjective + ?Sized>(
    problem: &P,
    xs: Vec<(Vec<f64>, usize)>,
) -> Result<Vec<FrontPoint>> {
    xs.into_par_iter()
        .map(|(x, iterate_count)| {
            let f = problem.values(&x)?;
            Ok(FrontPoint {
                x,
                f,
                iterate_count,
            })
        })
        .collect()
}

/// One outer iteration: perturb, run SMG from every point, filter, thin.
fn step<P: MultiObjective + ?Sized>(
    problem: &P,
    smg: &SmgConfig,
    config: &PfsmgConfig,
    list: &ParetoFront,
    iteration: usize,
) -> Result<(ParetoFront, u64)> {
    let it = iteration as u64;
    let mut perturbed = Vec::new();
    for (i, p) in list.points().iter().enumerate() {
        let mut g = rng::stream(config.seed, &[PERTURB_STREAM, it, i as u64]);
        for x in perturb(&p.x, config.perturbations, config.radius, &mut g) {
            perturbed.push((x, p.iterate_count));
        }
    }
    let mut candidates = list.points().to_vec();
    candidates.extend(evaluate(problem, perturbed)?);

    let jobs: Vec<(usize, usize)> = (0..candidates.len())
        .flat_map(|i| (0..config.runs_per_point).map(move |t| (i, t)))
        .collect();
    let runs: Vec<(FrontPoint, u64)> = jobs
        .par_iter()
        .map(|&(i, t)| {
            let parent = &candidates[i];
            let mut g = rng::stream(config.seed, &[SMG_STREAM, it, i as u64, t as u64]);
            let out = smg_run(
                problem,
                &parent.x,
                smg,
                parent.iterate_count,
                config.iters_per_run,
                &mut g,
            )?;
            let f = problem.values(&out.x)?;
            let point = FrontPoint {
                x: out.x,
                f,
                iterate_count: parent.iterate_count + config.iters_per_run,
            };
            Ok((point, out.grad_evals))
        })
        .collect::<Result<_>>()?;

    let evals = runs.iter().map(|(_, e)| e).sum();
    candidates.extend(runs.into_iter().map(|(p, _)| p));
    let mut front = filter_nondominated(candidates);
    if config.cell_fraction > 0.0 {
        front = density_thin(&front, config.cell_fraction);
    }
    Ok((front, evals))
}
