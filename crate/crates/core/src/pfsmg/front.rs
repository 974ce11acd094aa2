//! Dominance filtering, perturbation and density thinning.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// A parameter vector together with its objective values and the number of
/// SMG iterations along its lineage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub iterate_count: usize,
}

/// Points that are pairwise nondominated in objective space.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParetoFront {
    points: Vec<FrontPoint>,
}

impl ParetoFront {
    /// Filters `points` down to its nondominated subset.
    pub fn from_points(points: Vec<FrontPoint>) -> Self {
        filter_nondominated(points)
    }

    pub fn points(&self) -> &[FrontPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<FrontPoint> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn objective_values(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.f.clone()).collect()
    }

    /// Keeps the points at the given (sorted, distinct) positions.
    pub(crate) fn select(&self, keep: &[usize]) -> ParetoFront {
        ParetoFront {
            points: keep.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }
}

/// `u` dominates `v`: no worse everywhere and strictly better somewhere.
pub fn dominates(u: &[f64], v: &[f64]) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(dominates_unchecked(u, v))
}

pub(crate) fn dominates_unchecked(u: &[f64], v: &[f64]) -> bool {
    let mut strict = false;
    for (a, b) in u.iter().zip(v) {
        if a > b {
            return false;
        }
        if a < b {
            strict = true;
        }
    }
    strict
}

fn weakly_dominates(u: &[f64], v: &[f64]) -> bool {
    u.iter().zip(v).all(|(a, b)| a <= b)
}

fn lex(u: &[f64], v: &[f64]) -> Ordering {
    for (a, b) in u.iter().zip(v) {
        match a.total_cmp(b) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Positions of the nondominated vectors in `values`, in input order.
///
/// Of several identical vectors only the first is kept. Vectors with
/// non-finite entries are dropped.
pub fn nondominated_indices<V: AsRef<[f64]>>(values: &[V]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len())
        .filter(|&i| values[i].as_ref().iter().all(|v| v.is_finite()))
        .collect();
    order.sort_by(|&a, &b| lex(values[a].as_ref(), values[b].as_ref()).then(a.cmp(&b)));
    let m = values.first().map_or(0, |v| v.as_ref().len());

    let mut kept = Vec::new();
    if m == 2 {
        let mut best = f64::INFINITY;
        for i in order {
            let f2 = values[i].as_ref()[1];
            if f2 < best {
                best = f2;
                kept.push(i);
            }
        }
    } else {
        for i in order {
            let v = values[i].as_ref();
            if !kept
                .iter()
                .any(|&k: &usize| weakly_dominates(values[k].as_ref(), v))
            {
                kept.push(i);
            }
        }
    }
    kept.sort_unstable();
    kept
}

pub fn filter_nondominated(points: Vec<FrontPoint>) -> ParetoFront {
    let keep = nondominated_indices(&points.iter().map(|p| &p.f[..]).collect::<Vec<_>>());
    let mut keep = keep.into_iter().peekable();
    let points = points
        .into_iter()
        .enumerate()
        .filter_map(|(i, p)| {
            if keep.peek() == Some(&i) {
                keep.next();
                Some(p)
            } else {
                None
            }
        })
        .collect();
    ParetoFront { points }
}

/// `count` copies of `x` with every coordinate shifted uniformly within
/// `[-radius, radius]`.
pub fn perturb(x: &[f64], count: usize, radius: f64, rng: &mut Rng) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            x.iter()
                .map(|xi| xi + radius * (2.0 * rng.random::<f64>() - 1.0))
                .collect()
        })
        .collect()
}

/// Grid-based thinning: objective space is cut into cells whose edge is
/// `cell_fraction` of each objective's range, and each occupied cell keeps
/// its point with the smallest first objective. The minimizer of every
/// objective always survives.
pub fn density_thin(front: &ParetoFront, cell_fraction: f64) -> ParetoFront {
    let n = front.len();
    if n <= 1 || !(cell_fraction > 0.0) {
        return front.clone();
    }
    let m = front.points[0].f.len();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for p in &front.points {
        for i in 0..m {
            lo[i] = lo[i].min(p.f[i]);
            hi[i] = hi[i].max(p.f[i]);
        }
    }
    let edge: Vec<f64> = (0..m).map(|i| cell_fraction * (hi[i] - lo[i])).collect();

    let mut keep = vec![false; n];
    let mut cells: HashMap<Vec<i64>, usize> = HashMap::new();
    for (idx, p) in front.points.iter().enumerate() {
        let key: Vec<i64> = (0..m)
            .map(|i| {
                if edge[i] > 0.0 {
                    ((p.f[i] - lo[i]) / edge[i]).floor() as i64
                } else {
                    0
                }
            })
            .collect();
        cells
            .entry(key)
            .and_modify(|best| {
                if p.f[0] < front.points[*best].f[0] {
                    *best = idx;
                }
            })
            .or_insert(idx);
    }
    for &idx in cells.values() {
        keep[idx] = true;
    }
    for i in 0..m {
        let arg = (0..n)
            .min_by(|&a, &b| {
                front.points[a].f[i]
                    .total_cmp(&front.points[b].f[i])
                    .then(a.cmp(&b))
            })
            .expect("front is nonempty");
        keep[arg] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    front.select(&keep)
}
