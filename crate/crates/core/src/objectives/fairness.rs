//! Empirical group rates and CV scores of a fitted classifier.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::LinearModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub attribute: String,
    pub groups: Vec<String>,
    /// P(Yhat = +1 | A = group)
    pub positive_rate: Vec<f64>,
    /// P(Yhat = -1 | A = group, Y = +1)
    pub fnr: Vec<f64>,
    pub cv: f64,
    pub cv_fnr: f64,
}

fn spread(rates: &[f64]) -> f64 {
    let hi = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = rates.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Positive-prediction rate per category of `attribute` and their max−min gap.
pub fn positive_rates(
    model: &LinearModel,
    data: &Dataset,
    attribute: usize,
) -> Result<(Vec<f64>, f64)> {
    let attr = &data.attributes()[attribute];
    let mut hits = vec![0usize; attr.cardinality()];
    let mut totals = vec![0usize; attr.cardinality()];
    for s in data.samples() {
        let g = s.sensitive[attribute];
        totals[g] += 1;
        if model.predict(&s.features)? > 0 {
            hits[g] += 1;
        }
    }
    let rates = rates(&hits, &totals, |g| Error::EmptyGroup {
        attribute: attr.name.clone(),
        group: attr.categories[g].clone(),
    })?;
    let cv = spread(&rates);
    Ok((rates, cv))
}

/// False-negative rate per category (among truly positive samples) and the
/// max−min gap.
pub fn fnr_rates(model: &LinearModel, data: &Dataset, attribute: usize) -> Result<(Vec<f64>, f64)> {
    let attr = &data.attributes()[attribute];
    let mut misses = vec![0usize; attr.cardinality()];
    let mut positives = vec![0usize; attr.cardinality()];
    for s in data.samples().iter().filter(|s| s.label > 0) {
        let g = s.sensitive[attribute];
        positives[g] += 1;
        if model.predict(&s.features)? < 0 {
            misses[g] += 1;
        }
    }
    let rates = rates(&misses, &positives, |g| Error::EmptyGroup {
        attribute: attr.name.clone(),
        group: format!("{} (positive labels)", attr.categories[g]),
    })?;
    let cv = spread(&rates);
    Ok((rates, cv))
}

fn rates(hits: &[usize], totals: &[usize], empty: impl Fn(usize) -> Error) -> Result<Vec<f64>> {
    hits.iter()
        .zip(totals)
        .enumerate()
        .map(|(g, (&h, &t))| {
            if t == 0 {
                Err(empty(g))
            } else {
                Ok(h as f64 / t as f64)
            }
        })
        .collect()
}

pub fn fairness_report(
    model: &LinearModel,
    data: &Dataset,
    attribute: usize,
) -> Result<FairnessReport> {
    let attr = &data.attributes()[attribute];
    let (positive_rate, cv) = positive_rates(model, data, attribute)?;
    let (fnr, cv_fnr) = fnr_rates(model, data, attribute)?;
    Ok(FairnessReport {
        attribute: attr.name.clone(),
        groups: attr.categories.clone(),
        positive_rate,
        fnr,
        cv,
        cv_fnr,
    })
}
