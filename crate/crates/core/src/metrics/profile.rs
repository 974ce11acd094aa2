use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Performance profile of one algorithm: a nondecreasing step function of
/// `tau >= 1`, stored as its jump points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub algorithm: String,
    /// `(tau, fraction)` pairs; the fraction holds from `tau` up to the next jump.
    pub steps: Vec<(f64, f64)>,
    /// Ratio to the best for each problem; infinite when the algorithm failed.
    pub ratios: Vec<f64>,
}

impl ProfileCurve {
    /// Fraction of problems on which the ratio is at most `tau`.
    pub fn fraction_at(&self, tau: f64) -> f64 {
        let solved = self.ratios.iter().filter(|&&r| r <= tau).count();
        solved as f64 / self.ratios.len() as f64
    }
}

/// Dolan–Moré profiles from `table[problem][algorithm]`.
///
/// Values must be positive; `f64::INFINITY` marks a failure for
/// lower-is-better metrics. Higher-is-better metrics are inverted first, so a
/// zero there also counts as a failure.
pub fn performance_profile(
    algorithms: &[String],
    table: &[Vec<f64>],
    higher_is_better: bool,
) -> Result<Vec<ProfileCurve>> {
    if algorithms.is_empty() || table.is_empty() {
        return Err(Error::invalid(
            "performance profiles need algorithms and problems",
        ));
    }
    let mut costs = Vec::with_capacity(table.len());
    for (t, row) in table.iter().enumerate() {
        if row.len() != algorithms.len() {
            return Err(Error::DimensionMismatch {
                expected: algorithms.len(),
                got: row.len(),
            });
        }
        let mut out = Vec::with_capacity(row.len());
        for &v in row {
            let cost = if higher_is_better {
                if v.is_nan() || v < 0.0 || v.is_infinite() {
                    return Err(Error::invalid(format!("problem {t}: bad metric value {v}")));
                }
                if v == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / v
                }
            } else {
                if v.is_nan() || !(v > 0.0) {
                    return Err(Error::invalid(format!(
                        "problem {t}: metric values must be positive, got {v}"
                    )));
                }
                v
            };
            out.push(cost);
        }
        costs.push(out);
    }

    let ratios: Vec<Vec<f64>> = costs
        .iter()
        .map(|row| {
            let best = row.iter().copied().fold(f64::INFINITY, f64::min);
            row.iter()
                .map(|&c| {
                    if best.is_finite() && c.is_finite() {
                        c / best
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        })
        .collect();

    Ok(algorithms
        .iter()
        .enumerate()
        .map(|(a, name)| {
            let mine: Vec<f64> = ratios.iter().map(|row| row[a]).collect();
            let mut taus: Vec<f64> = mine.iter().copied().filter(|r| r.is_finite()).collect();
            taus.push(1.0);
            taus.sort_by(f64::total_cmp);
            taus.dedup();
            let curve = ProfileCurve {
                algorithm: name.clone(),
                steps: Vec::new(),
                ratios: mine,
            };
            let steps = taus.iter().map(|&t| (t, curve.fraction_at(t))).collect();
            ProfileCurve { steps, ..curve }
        })
        .collect())
}
