//! Front-quality measures: purity, spread, hypervolume and performance
//! profiles.

mod hypervolume;
mod profile;

pub use hypervolume::{hypervolume, hypervolume_clipped};
pub use profile::{performance_profile, ProfileCurve};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pfsmg::{nondominated_indices, ParetoFront};

fn check_same_width<V: AsRef<[f64]>>(front: &[V]) -> Result<usize> {
    let m = front
        .first()
        .map(|p| p.as_ref().len())
        .ok_or_else(|| Error::invalid("front is empty"))?;
    for p in front {
        if p.as_ref().len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: p.as_ref().len(),
            });
        }
    }
    Ok(m)
}

/// Share of each front's points that survive in the nondominated subset of
/// the union of all fronts.
///
/// Membership is exact equality when `tolerance` is 0, otherwise a
/// max-coordinate distance of at most `tolerance`.
pub fn purity(fronts: &[Vec<Vec<f64>>], tolerance: f64) -> Result<Vec<f64>> {
    if fronts.is_empty() {
        return Err(Error::invalid("purity needs at least one front"));
    }
    let union: Vec<&[f64]> = fronts.iter().flatten().map(Vec::as_slice).collect();
    for f in fronts {
        if f.is_empty() {
            return Err(Error::invalid("purity of an empty front is undefined"));
        }
    }
    check_same_width(&union)?;
    let reference: Vec<&[f64]> = nondominated_indices(&union)
        .into_iter()
        .map(|i| union[i])
        .collect();
    let member = |p: &[f64]| {
        reference.iter().any(|r| {
            r.iter().zip(p).all(|(a, b)| {
                if tolerance > 0.0 {
                    (a - b).abs() <= tolerance
                } else {
                    a == b
                }
            })
        })
    };
    Ok(fronts
        .iter()
        .map(|f| f.iter().filter(|p| member(p)).count() as f64 / f.len() as f64)
        .collect())
}

/// Positions of the extreme pair: the minimizer and maximizer of the
/// objective with the widest range, lowest objective index on ties.
pub fn extreme_points<V: AsRef<[f64]>>(front: &[V]) -> Result<(usize, usize)> {
    if front.len() < 2 {
        return Err(Error::invalid("extreme points need at least two points"));
    }
    let m = check_same_width(front)?;
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..m {
        let col = |j: usize| front[j].as_ref()[i];
        let mut lo = 0;
        let mut hi = 0;
        for j in 1..front.len() {
            if col(j) < col(lo) {
                lo = j;
            }
            if col(j) > col(hi) {
                hi = j;
            }
        }
        let range = col(hi) - col(lo);
        if best.is_none_or(|(r, _, _)| range > r) {
            best = Some((range, lo, hi));
        }
    }
    let (_, lo, hi) = best.expect("at least one objective");
    Ok((lo, hi))
}

/// Per objective: the front's values together with the two extreme points,
/// sorted increasingly.
fn augmented_columns<V: AsRef<[f64]>>(front: &[V]) -> Result<Vec<Vec<f64>>> {
    let m = check_same_width(front)?;
    let (lo, hi) = if front.len() == 1 {
        (0, 0)
    } else {
        extreme_points(front)?
    };
    Ok((0..m)
        .map(|i| {
            let mut col: Vec<f64> = front.iter().map(|p| p.as_ref()[i]).collect();
            col.push(front[lo].as_ref()[i]);
            col.push(front[hi].as_ref()[i]);
            col.sort_by(f64::total_cmp);
            col
        })
        .collect())
}

/// Largest gap between consecutive sorted values of any objective, the
/// extreme points included.
pub fn spread_gamma<V: AsRef<[f64]>>(front: &[V]) -> Result<f64> {
    let cols = augmented_columns(front)?;
    Ok(cols
        .iter()
        .flat_map(|c| c.windows(2).map(|w| w[1] - w[0]))
        .fold(0.0, f64::max))
}

/// Non-uniformity of the gaps, normalized per objective; the worst objective
/// is reported. Objectives whose gaps all vanish are skipped.
pub fn spread_delta<V: AsRef<[f64]>>(front: &[V]) -> Result<f64> {
    if front.len() < 2 {
        return Err(Error::invalid("spread delta needs at least two points"));
    }
    let cols = augmented_columns(front)?;
    let mut worst: f64 = 0.0;
    for col in cols {
        let gaps: Vec<f64> = col.windows(2).map(|w| w[1] - w[0]).collect();
        let m = gaps.len() - 1;
        let (first, last) = (gaps[0], gaps[m]);
        let inner = &gaps[1..m];
        let mean = inner.iter().sum::<f64>() / inner.len() as f64;
        let denom = first + last + inner.len() as f64 * mean;
        if denom <= 0.0 {
            continue;
        }
        let dev: f64 = inner.iter().map(|d| (d - mean).abs()).sum();
        worst = worst.max((first + last + dev) / denom);
    }
    Ok(worst)
}

/// Componentwise maximum plus 10% of the range. A coordinate with zero range
/// is padded by 10% of its magnitude (at least 0.1) so single points still
/// enclose a positive volume.
pub fn reference_point<V: AsRef<[f64]>>(points: &[V]) -> Result<Vec<f64>> {
    let m = check_same_width(points)?;
    Ok((0..m)
        .map(|i| {
            let (lo, hi) = points
                .iter()
                .map(|p| p.as_ref()[i])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            let range = hi - lo;
            let pad = if range > 0.0 {
                0.1 * range
            } else {
                0.1 * hi.abs().max(1.0)
            };
            hi + pad
        })
        .collect())
}

/// Positions (in input order) of `count` points at evenly spaced ranks of
/// the order by first objective; both first-objective extremes are kept.
pub fn downsample_indices<V: AsRef<[f64]>>(front: &[V], count: usize) -> Result<Vec<usize>> {
    if count < 2 {
        return Err(Error::invalid("downsampling needs at least two points"));
    }
    let n = front.len();
    if count > n {
        return Err(Error::invalid(format!(
            "cannot downsample {n} points to {count}"
        )));
    }
    check_same_width(front)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (u, v) = (front[a].as_ref(), front[b].as_ref());
        u[0].total_cmp(&v[0]).then_with(|| {
            u.iter()
                .zip(v)
                .skip(1)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let mut keep: Vec<usize> = (0..count)
        .map(|j| order[((j * (n - 1)) as f64 / (count - 1) as f64).round() as usize])
        .collect();
    keep.sort_unstable();
    keep.dedup();
    Ok(keep)
}

pub fn downsample(front: &ParetoFront, count: usize) -> Result<ParetoFront> {
    let keep = downsample_indices(&front.objective_values(), count)?;
    Ok(front.select(&keep))
}

/// Quality measures of one algorithm's front on one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMetrics {
    pub algorithm: String,
    pub points: usize,
    pub purity: f64,
    pub gamma: f64,
    /// Undefined for fronts with fewer than two points.
    pub delta: Option<f64>,
    pub hypervolume: f64,
    pub cpu_seconds: Option<f64>,
    pub grad_evals: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontComparison {
    pub reference: Vec<f64>,
    pub algorithms: Vec<FrontMetrics>,
}

/// Purity, spreads and hypervolume of several fronts of the same problem,
/// with a shared hypervolume reference derived from their union unless one
/// is given.
pub fn compare_fronts(
    fronts: &[(String, Vec<Vec<f64>>)],
    purity_tolerance: f64,
    reference: Option<Vec<f64>>,
) -> Result<FrontComparison> {
    let sets: Vec<Vec<Vec<f64>>> = fronts.iter().map(|(_, f)| f.clone()).collect();
    let purities = purity(&sets, purity_tolerance)?;
    let union: Vec<&[f64]> = sets.iter().flatten().map(Vec::as_slice).collect();
    let reference = match reference {
        Some(r) => r,
        None => reference_point(&union)?,
    };
    let algorithms = fronts
        .iter()
        .zip(purities)
        .map(|((name, f), purity)| {
            Ok(FrontMetrics {
                algorithm: name.clone(),
                points: f.len(),
                purity,
                gamma: spread_gamma(f)?,
                delta: if f.len() >= 2 {
                    Some(spread_delta(f)?)
                } else {
                    None
                },
                hypervolume: hypervolume(f, &reference)?,
                cpu_seconds: None,
                grad_evals: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrontComparison {
        reference,
        algorithms,
    })
}
