//! Datasets with sensitive attributes.
//!
//! A [`Dataset`] is immutable once built. Each sensitive attribute with `K`
//! categories is expanded into `K` indicator columns whose means are cached,
//! since every fairness objective centers the indicator by the full-data mean
//! even when it is evaluated on a batch.

mod adult;
mod batch;
mod compas;
mod csv;
mod split;
mod synthetic;

pub use adult::{preprocess_adult, preprocess_adult_raw};
pub use batch::{sample_batch, BatchSchedule};
pub use compas::{load_compas, load_compas_raw};
pub use csv::{
    load_csv, load_csv_raw, load_csv_shards, write_encoded, CsvSchema, FeatureKind, FeatureSpec,
    LabelSpec, SensitiveSpec,
};
pub use split::{split, split_indices, SplitSpec};
pub use synthetic::{generate_synthetic, SyntheticConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One encoded example. `label` is -1 or +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub sensitive: Vec<usize>,
    pub label: i8,
}

impl Sample {
    #[inline]
    pub fn y(&self) -> f64 {
        f64::from(self.label)
    }
}

/// A categorical sensitive attribute. Sample codes index into `categories`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub categories: Vec<String>,
}

impl Attribute {
    pub fn new(name: impl Into<String>, categories: &[&str]) -> Self {
        Attribute {
            name: name.into(),
            categories: categories.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.categories.len()
    }
}

/// 0/1 indicator columns of one attribute and their means.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorCache {
    pub columns: Vec<Vec<f64>>,
    pub means: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    feature_names: Vec<String>,
    continuous: Vec<bool>,
    attributes: Vec<Attribute>,
    indicators: Vec<IndicatorCache>,
}

impl Dataset {
    /// Builds a dataset, checking every sample against the declared layout.
    ///
    /// `continuous[i]` marks feature `i` as a real-valued column that
    /// normalization applies to (one-hot columns are left alone).
    pub fn new(
        feature_names: Vec<String>,
        continuous: Vec<bool>,
        attributes: Vec<Attribute>,
        samples: Vec<Sample>,
    ) -> Result<Self> {
        if continuous.len() != feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: feature_names.len(),
                got: continuous.len(),
            });
        }
        for (j, s) in samples.iter().enumerate() {
            if s.features.len() != feature_names.len() {
                return Err(Error::invalid(format!(
                    "sample {j} has {} features, expected {}",
                    s.features.len(),
                    feature_names.len()
                )));
            }
            if s.label != 1 && s.label != -1 {
                return Err(Error::invalid(format!(
                    "sample {j} has label {}, expected -1 or +1",
                    s.label
                )));
            }
            if s.sensitive.len() != attributes.len() {
                return Err(Error::invalid(format!(
                    "sample {j} has {} sensitive codes, expected {}",
                    s.sensitive.len(),
                    attributes.len()
                )));
            }
            for (code, attr) in s.sensitive.iter().zip(&attributes) {
                if *code >= attr.cardinality() {
                    return Err(Error::invalid(format!(
                        "sample {j}: code {code} out of range for attribute `{}` (K={})",
                        attr.name,
                        attr.cardinality()
                    )));
                }
            }
        }
        let indicators = build_indicators(&attributes, &samples);
        Ok(Dataset {
            samples,
            feature_names,
            continuous,
            attributes,
            indicators,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn continuous(&self) -> &[bool] {
        &self.continuous
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::Schema(format!("unknown sensitive attribute `{name}`")))
    }

    pub fn indicators(&self, attribute: usize) -> &IndicatorCache {
        &self.indicators[attribute]
    }

    /// Sample count per category of `attribute`.
    pub fn group_counts(&self, attribute: usize) -> Vec<usize> {
        let mut counts = vec![0; self.attributes[attribute].cardinality()];
        for s in &self.samples {
            counts[s.sensitive[attribute]] += 1;
        }
        counts
    }

    pub fn positive_count(&self) -> usize {
        self.samples.iter().filter(|s| s.label > 0).count()
    }

    /// Dataset restricted to `indices` (in that order, repeats allowed).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let samples = indices.iter().map(|&i| self.samples[i].clone()).collect();
        self.with_samples(samples)
    }

    /// Appends `other`; layouts must match exactly.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        self.check_same_layout(other)?;
        let mut samples = self.samples.clone();
        samples.extend(other.samples.iter().cloned());
        Ok(self.with_samples(samples))
    }

    pub fn check_same_layout(&self, other: &Dataset) -> Result<()> {
        if self.feature_names != other.feature_names || self.continuous != other.continuous {
            return Err(Error::Schema(format!(
                "feature layout differs ({} vs {} features)",
                self.feature_dim(),
                other.feature_dim()
            )));
        }
        if self.attributes != other.attributes {
            return Err(Error::Schema("sensitive attributes differ".into()));
        }
        Ok(())
    }

    fn with_samples(&self, samples: Vec<Sample>) -> Dataset {
        let indicators = build_indicators(&self.attributes, &samples);
        Dataset {
            samples,
            feature_names: self.feature_names.clone(),
            continuous: self.continuous.clone(),
            attributes: self.attributes.clone(),
            indicators,
        }
    }

    /// Z-scores the continuous columns on this data; returns the fitted
    /// statistics so they can be reused on held-out parts.
    pub fn normalized(&self) -> (Dataset, Normalizer) {
        let norm = Normalizer::fit(self);
        (norm.apply(self), norm)
    }
}

fn build_indicators(attributes: &[Attribute], samples: &[Sample]) -> Vec<IndicatorCache> {
    attributes
        .iter()
        .enumerate()
        .map(|(a, attr)| {
            let k = attr.cardinality();
            let mut columns = vec![vec![0.0; samples.len()]; k];
            for (j, s) in samples.iter().enumerate() {
                columns[s.sensitive[a]][j] = 1.0;
            }
            let means = columns
                .iter()
                .map(|col| {
                    if col.is_empty() {
                        0.0
                    } else {
                        col.iter().sum::<f64>() / col.len() as f64
                    }
                })
                .collect();
            IndicatorCache { columns, means }
        })
        .collect()
}

/// Per-column z-score statistics for the continuous features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub columns: Vec<usize>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalizer {
    /// Population mean and standard deviation of every continuous column.
    pub fn fit(data: &Dataset) -> Normalizer {
        let columns: Vec<usize> = data
            .continuous
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
            .collect();
        let n = data.len().max(1) as f64;
        let mut mean = Vec::with_capacity(columns.len());
        let mut std = Vec::with_capacity(columns.len());
        for &c in &columns {
            let mu = data.samples.iter().map(|s| s.features[c]).sum::<f64>() / n;
            let var = data
                .samples
                .iter()
                .map(|s| (s.features[c] - mu).powi(2))
                .sum::<f64>()
                / n;
            mean.push(mu);
            std.push(var.sqrt());
        }
        Normalizer { columns, mean, std }
    }

    /// Applies the fitted statistics. Zero-variance columns become 0.
    pub fn apply(&self, data: &Dataset) -> Dataset {
        for (k, &c) in self.columns.iter().enumerate() {
            if self.std[k] == 0.0 {
                log::warn!(
                    "continuous column `{}` has zero variance; encoded as constant 0",
                    data.feature_names[c]
                );
            }
        }
        let samples = data
            .samples
            .iter()
            .map(|s| {
                let mut features = s.features.clone();
                for (k, &c) in self.columns.iter().enumerate() {
                    features[c] = if self.std[k] == 0.0 {
                        0.0
                    } else {
                        (features[c] - self.mean[k]) / self.std[k]
                    };
                }
                Sample {
                    features,
                    sensitive: s.sensitive.clone(),
                    label: s.label,
                }
            })
            .collect();
        data.with_samples(samples)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Tiny dataset with one binary and one 3-valued attribute.
    pub fn small() -> Dataset {
        let attrs = vec![
            Attribute::new("g", &["m", "f"]),
            Attribute::new("r", &["a", "b", "c"]),
        ];
        let rows = [
            ([0.5, -1.0], [0, 0], 1),
            ([1.5, 0.3], [1, 1], -1),
            ([-0.2, 2.0], [0, 2], 1),
            ([0.9, 0.1], [1, 0], -1),
            ([-1.1, -0.4], [0, 1], 1),
            ([0.0, 0.7], [1, 2], 1),
        ];
        let samples = rows
            .iter()
            .map(|(f, s, y)| Sample {
                features: f.to_vec(),
                sensitive: s.to_vec(),
                label: *y,
            })
            .collect();
        Dataset::new(
            vec!["x0".into(), "x1".into()],
            vec![true, true],
            attrs,
            samples,
        )
        .unwrap()
    }
}
