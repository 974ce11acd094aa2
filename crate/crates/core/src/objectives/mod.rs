//! Accuracy and fairness objectives over a linear model `x = (c, b)`.
//!
//! All objectives are averages over a sample set: either the whole bound
//! dataset or a batch of indices into it. Attribute indicators are always
//! centered by the full-dataset mean, so a batch estimate of a covariance
//! differs from the full one only through the sampled rows.

mod fairness;
pub mod smooth;

pub use fairness::{fairness_report, fnr_rates, positive_rates, FairnessReport};

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::margin;
use crate::problem::MultiObjective;
use smooth::{sigmoid, soft_max, soft_min0, soft_min0_slope, softplus};

pub const DEFAULT_BETA: f64 = 8.0;

fn default_beta() -> f64 {
    DEFAULT_BETA
}

/// Objective descriptor as it appears in run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    /// Mean logistic loss plus `lambda_reg / 2 * |c|^2`.
    LogisticLoss {
        #[serde(default)]
        lambda_reg: f64,
    },
    /// Squared decision-boundary covariance with a binary attribute.
    DiBinary { attribute: String },
    /// Soft maximum over categories of the squared covariances.
    DiMulti {
        attribute: String,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    /// Squared covariance with the smoothed false-negative margin.
    EqualOppFnr {
        attribute: String,
        #[serde(default = "default_beta")]
        beta: f64,
    },
}

impl ObjectiveSpec {
    pub fn attribute(&self) -> Option<&str> {
        match self {
            ObjectiveSpec::LogisticLoss { .. } => None,
            ObjectiveSpec::DiBinary { attribute }
            | ObjectiveSpec::DiMulti { attribute, .. }
            | ObjectiveSpec::EqualOppFnr { attribute, .. } => Some(attribute),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ObjectiveSpec::LogisticLoss { .. } => "logistic_loss".into(),
            ObjectiveSpec::DiBinary { attribute } => format!("di_binary({attribute})"),
            ObjectiveSpec::DiMulti { attribute, .. } => format!("di_multi({attribute})"),
            ObjectiveSpec::EqualOppFnr { attribute, .. } => format!("equal_opp_fnr({attribute})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveSet {
    specs: Vec<ObjectiveSpec>,
}

impl ObjectiveSet {
    pub fn new(specs: Vec<ObjectiveSpec>) -> Result<Self> {
        if !(2..=3).contains(&specs.len()) {
            return Err(Error::invalid(format!(
                "an objective set needs 2 or 3 objectives, got {}",
                specs.len()
            )));
        }
        for s in &specs {
            match s {
                ObjectiveSpec::LogisticLoss { lambda_reg } if !(*lambda_reg >= 0.0) => {
                    return Err(Error::invalid("lambda_reg must be >= 0"))
                }
                ObjectiveSpec::DiMulti { beta, .. } | ObjectiveSpec::EqualOppFnr { beta, .. }
                    if !(*beta > 0.0 && beta.is_finite()) =>
                {
                    return Err(Error::invalid("beta must be > 0"))
                }
                _ => {}
            }
        }
        Ok(ObjectiveSet { specs })
    }

    pub fn specs(&self) -> &[ObjectiveSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// Resolves attributes against `data` and checks each objective's
    /// preconditions.
    pub fn bind<'a>(&self, data: &'a Dataset) -> Result<BoundObjectives<'a>> {
        let objectives = self
            .specs
            .iter()
            .map(|s| Objective::bind(s, data))
            .collect::<Result<_>>()?;
        Ok(BoundObjectives { data, objectives })
    }
}

/// An objective resolved against a dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Logistic { lambda_reg: f64 },
    DiBinary { attribute: usize },
    DiMulti { attribute: usize, beta: f64 },
    EqualOppFnr { attribute: usize, beta: f64 },
}

impl Objective {
    pub fn bind(spec: &ObjectiveSpec, data: &Dataset) -> Result<Objective> {
        let binary = |name: &str| -> Result<usize> {
            let a = data.attribute_index(name)?;
            let k = data.attributes()[a].cardinality();
            if k != 2 {
                return Err(Error::invalid(format!(
                    "attribute `{name}` has {k} categories; the binary objective needs 2 \
                     (use di_multi for multi-valued attributes)"
                )));
            }
            Ok(a)
        };
        Ok(match spec {
            ObjectiveSpec::LogisticLoss { lambda_reg } => Objective::Logistic {
                lambda_reg: *lambda_reg,
            },
            ObjectiveSpec::DiBinary { attribute } => Objective::DiBinary {
                attribute: binary(attribute)?,
            },
            ObjectiveSpec::DiMulti { attribute, beta } => {
                let a = data.attribute_index(attribute)?;
                if data.attributes()[a].cardinality() < 2 {
                    return Err(Error::invalid(format!(
                        "attribute `{attribute}` needs at least 2 categories"
                    )));
                }
                Objective::DiMulti {
                    attribute: a,
                    beta: *beta,
                }
            }
            ObjectiveSpec::EqualOppFnr { attribute, beta } => {
                let a = binary(attribute)?;
                if data.positive_count() == 0 {
                    return Err(Error::invalid(
                        "equal-opportunity objective needs at least one positive label",
                    ));
                }
                Objective::EqualOppFnr {
                    attribute: a,
                    beta: *beta,
                }
            }
        })
    }

    pub fn value(&self, data: &Dataset, x: &[f64], batch: Option<&[usize]>) -> f64 {
        match *self {
            Objective::Logistic { lambda_reg } => logistic_loss(data, x, lambda_reg, batch),
            Objective::DiBinary { attribute } => {
                let cov = boundary_covariance(data, x, attribute, 1, batch);
                cov * cov
            }
            Objective::DiMulti { attribute, beta } => {
                let sq: Vec<f64> = (0..data.attributes()[attribute].cardinality())
                    .map(|i| boundary_covariance(data, x, attribute, i, batch).powi(2))
                    .collect();
                soft_max(&sq, beta).0
            }
            Objective::EqualOppFnr { attribute, beta } => {
                let cov = fnr_covariance(data, x, attribute, beta, batch);
                cov * cov
            }
        }
    }

    pub fn gradient(&self, data: &Dataset, x: &[f64], batch: Option<&[usize]>) -> Vec<f64> {
        match *self {
            Objective::Logistic { lambda_reg } => logistic_grad(data, x, lambda_reg, batch),
            Objective::DiBinary { attribute } => {
                let (cov, dir) = covariance_with_direction(data, x, attribute, 1, batch);
                scaled(&dir, 2.0 * cov)
            }
            Objective::DiMulti { attribute, beta } => {
                let k = data.attributes()[attribute].cardinality();
                let parts: Vec<(f64, Vec<f64>)> = (0..k)
                    .map(|i| covariance_with_direction(data, x, attribute, i, batch))
                    .collect();
                let sq: Vec<f64> = parts.iter().map(|(c, _)| c * c).collect();
                let (_, dsq) = soft_max(&sq, beta);
                let mut g = vec![0.0; x.len()];
                for ((cov, dir), w) in parts.iter().zip(dsq) {
                    let s = 2.0 * cov * w;
                    for (gi, di) in g.iter_mut().zip(dir) {
                        *gi += s * di;
                    }
                }
                g
            }
            Objective::EqualOppFnr { attribute, beta } => {
                fnr_covariance_gradient(data, x, attribute, beta, batch)
            }
        }
    }
}

/// Visits the batch indices, or every index when there is no batch.
#[inline]
fn for_each_index(batch: Option<&[usize]>, n: usize, mut f: impl FnMut(usize)) {
    match batch {
        Some(b) => b.iter().for_each(|&j| f(j)),
        None => (0..n).for_each(f),
    }
}

fn batch_len(batch: Option<&[usize]>, n: usize) -> f64 {
    batch.map_or(n, <[usize]>::len).max(1) as f64
}

fn split_params(x: &[f64]) -> (&[f64], f64) {
    let (b, c) = x.split_last().expect("parameter vector has an intercept");
    (c, *b)
}

fn scaled(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|e| e * s).collect()
}

/// Adds `s * (z, 1)` into `acc`.
#[inline]
fn axpy_augmented(acc: &mut [f64], s: f64, z: &[f64]) {
    let (last, head) = acc.split_last_mut().unwrap();
    for (a, zi) in head.iter_mut().zip(z) {
        *a += s * zi;
    }
    *last += s;
}

pub fn logistic_loss(data: &Dataset, x: &[f64], lambda_reg: f64, batch: Option<&[usize]>) -> f64 {
    let (c, b) = split_params(x);
    let samples = data.samples();
    let mut total = 0.0;
    for_each_index(batch, samples.len(), |j| {
        let s = &samples[j];
        total += softplus(-s.y() * margin(c, b, &s.features));
    });
    let reg = 0.5 * lambda_reg * c.iter().map(|v| v * v).sum::<f64>();
    total / batch_len(batch, samples.len()) + reg
}

pub fn logistic_grad(
    data: &Dataset,
    x: &[f64],
    lambda_reg: f64,
    batch: Option<&[usize]>,
) -> Vec<f64> {
    let (c, b) = split_params(x);
    let samples = data.samples();
    let mut g = vec![0.0; x.len()];
    for_each_index(batch, samples.len(), |j| {
        let s = &samples[j];
        let y = s.y();
        let w = -y * sigmoid(-y * margin(c, b, &s.features));
        axpy_augmented(&mut g, w, &s.features);
    });
    let inv = 1.0 / batch_len(batch, samples.len());
    for (gi, ci) in g.iter_mut().zip(c) {
        *gi = *gi * inv + lambda_reg * ci;
    }
    *g.last_mut().unwrap() *= inv;
    g
}

/// `(1/B) sum_j (a_j - mean(a)) (c·z_j + b)` for the indicator of `category`.
pub fn boundary_covariance(
    data: &Dataset,
    x: &[f64],
    attribute: usize,
    category: usize,
    batch: Option<&[usize]>,
) -> f64 {
    let (c, b) = split_params(x);
    let samples = data.samples();
    let cache = data.indicators(attribute);
    let (col, mean) = (&cache.columns[category], cache.means[category]);
    let mut total = 0.0;
    for_each_index(batch, samples.len(), |j| {
        total += (col[j] - mean) * margin(c, b, &samples[j].features);
    });
    total / batch_len(batch, samples.len())
}

/// Gradient of [`boundary_covariance`] on the full dataset; the covariance
/// is linear, so this is `w` in `cov(x) = w · x`.
pub fn covariance_direction(data: &Dataset, attribute: usize, category: usize) -> Vec<f64> {
    let x = vec![0.0; data.feature_dim() + 1];
    covariance_with_direction(data, &x, attribute, category, None).1
}

/// The covariance together with its gradient `(1/B) sum_j (a_j - mean)(z_j, 1)`,
/// which does not depend on `x`.
fn covariance_with_direction(
    data: &Dataset,
    x: &[f64],
    attribute: usize,
    category: usize,
    batch: Option<&[usize]>,
) -> (f64, Vec<f64>) {
    let (c, b) = split_params(x);
    let samples = data.samples();
    let cache = data.indicators(attribute);
    let (col, mean) = (&cache.columns[category], cache.means[category]);
    let mut total = 0.0;
    let mut dir = vec![0.0; x.len()];
    for_each_index(batch, samples.len(), |j| {
        let centered = col[j] - mean;
        let z = &samples[j].features;
        total += centered * margin(c, b, z);
        axpy_augmented(&mut dir, centered, z);
    });
    let inv = 1.0 / batch_len(batch, samples.len());
    (total * inv, scaled(&dir, inv))
}

/// Covariance of the binary attribute with the smoothed false-negative margin
/// `soft_min0(((1 + y) / 2) y (c·z + b))`. Negative-label samples contribute
/// the constant `soft_min0(0)`.
pub fn fnr_covariance(
    data: &Dataset,
    x: &[f64],
    attribute: usize,
    beta: f64,
    batch: Option<&[usize]>,
) -> f64 {
    let (c, b) = split_params(x);
    let samples = data.samples();
    let cache = data.indicators(attribute);
    let (col, mean) = (&cache.columns[1], cache.means[1]);
    let mut total = 0.0;
    for_each_index(batch, samples.len(), |j| {
        let s = &samples[j];
        let t = if s.label > 0 {
            margin(c, b, &s.features)
        } else {
            0.0
        };
        total += (col[j] - mean) * soft_min0(t, beta);
    });
    total / batch_len(batch, samples.len())
}

fn fnr_covariance_gradient(
    data: &Dataset,
    x: &[f64],
    attribute: usize,
    beta: f64,
    batch: Option<&[usize]>,
) -> Vec<f64> {
    let (c, b) = split_params(x);
    let samples = data.samples();
    let cache = data.indicators(attribute);
    let (col, mean) = (&cache.columns[1], cache.means[1]);
    let mut total = 0.0;
    let mut dir = vec![0.0; x.len()];
    let neg_const = soft_min0(0.0, beta);
    for_each_index(batch, samples.len(), |j| {
        let s = &samples[j];
        let centered = col[j] - mean;
        if s.label > 0 {
            let m = margin(c, b, &s.features);
            total += centered * soft_min0(m, beta);
            axpy_augmented(&mut dir, centered * soft_min0_slope(m, beta), &s.features);
        } else {
            total += centered * neg_const;
        }
    });
    let inv = 1.0 / batch_len(batch, samples.len());
    scaled(&dir, 2.0 * total * inv * inv)
}

/// A bound objective set: 2–3 objectives on one dataset.
#[derive(Debug, Clone)]
pub struct BoundObjectives<'a> {
    data: &'a Dataset,
    objectives: Vec<Objective>,
}

impl<'a> BoundObjectives<'a> {
    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    pub fn value(&self, objective: usize, x: &[f64], batch: Option<&[usize]>) -> f64 {
        self.objectives[objective].value(self.data, x, batch)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

impl MultiObjective for BoundObjectives<'_> {
    fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    fn dim(&self) -> usize {
        self.data.feature_dim() + 1
    }

    fn num_samples(&self) -> Option<usize> {
        Some(self.data.len())
    }

    fn values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self
            .objectives
            .iter()
            .map(|o| o.value(self.data, x, None))
            .collect())
    }

    fn gradient(&self, objective: usize, x: &[f64], batch: Option<&[usize]>) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        if let Some(b) = batch {
            if let Some(&bad) = b.iter().find(|&&j| j >= self.data.len()) {
                return Err(Error::invalid(format!(
                    "batch index {bad} out of range for {} samples",
                    self.data.len()
                )));
            }
        }
        Ok(self.objectives[objective].gradient(self.data, x, batch))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{fixtures, Attribute, Sample};
    use proptest::prelude::*;

    fn one_feature(rows: &[(f64, usize, i8)]) -> Dataset {
        let samples = rows
            .iter()
            .map(|&(z, a, y)| Sample {
                features: vec![z],
                sensitive: vec![a],
                label: y,
            })
            .collect();
        Dataset::new(
            vec!["z".into()],
            vec![true],
            vec![Attribute::new("a", &["0", "1"])],
            samples,
        )
        .unwrap()
    }

    #[test]
    fn logistic_loss_examples() {
        let d = fixtures::small();
        let zero = vec![0.0; 3];
        assert!((logistic_loss(&d, &zero, 0.0, None) - 2f64.ln()).abs() < 1e-15);

        let single = one_feature(&[(1.0, 0, 1)]);
        let l = logistic_loss(&single, &[10.0, 0.0], 0.0, None);
        assert!((l - 4.539_889_921_686_465e-5).abs() < 1e-17);

        let base = logistic_loss(&d, &[2.0, 0.0, 0.7], 0.0, None);
        let reg = logistic_loss(&d, &[2.0, 0.0, 0.7], 1.0, None);
        assert!((reg - base - 2.0).abs() < 1e-12);
    }

    #[test]
    fn logistic_loss_is_stable_at_large_margins() {
        let d = one_feature(&[(1.0, 0, -1), (1.0, 1, 1)]);
        let l = logistic_loss(&d, &[700.0, 0.0], 0.0, None);
        assert!((l - 350.0).abs() < 1e-9);
        assert!(logistic_grad(&d, &[700.0, 0.0], 0.0, None)
            .iter()
            .all(|g| g.is_finite()));
    }

    #[test]
    fn logistic_gradient_at_origin() {
        let d = one_feature(&[(2.5, 0, 1)]);
        let g = logistic_grad(&d, &[0.0, 0.0], 0.0, None);
        assert_eq!(g, vec![-1.25, -0.5]);
        let d = one_feature(&[(2.5, 0, -1)]);
        let g = logistic_grad(&d, &[0.0, 0.0], 0.0, None);
        assert_eq!(g, vec![1.25, 0.5]);
    }

    #[test]
    fn di_binary_examples() {
        // a = (0, 1), margins (0, 2): ((1/2)(-0.5*0 + 0.5*2))^2
        let d = one_feature(&[(0.0, 0, 1), (2.0, 1, 1)]);
        let o = Objective::DiBinary { attribute: 0 };
        assert!((o.value(&d, &[1.0, 0.0], None) - 0.25).abs() < 1e-15);
        // constant attribute
        let flat = one_feature(&[(0.0, 1, 1), (2.0, 1, -1), (5.0, 1, 1)]);
        assert_eq!(o.value(&flat, &[1.3, -0.2], None), 0.0);
        assert!(o
            .gradient(&flat, &[1.3, -0.2], None)
            .iter()
            .all(|g| *g == 0.0));
        // constant margins
        assert!(o.value(&d, &[0.0, 4.0], None).abs() < 1e-30);
    }

    #[test]
    fn di_binary_rejects_multi_valued() {
        let d = fixtures::small();
        let spec = ObjectiveSpec::DiBinary {
            attribute: "r".into(),
        };
        assert!(Objective::bind(&spec, &d).is_err());
        let spec = ObjectiveSpec::DiMulti {
            attribute: "r".into(),
            beta: 8.0,
        };
        assert!(Objective::bind(&spec, &d).is_ok());
    }

    #[test]
    fn di_multi_equals_common_value() {
        // Binary attribute: both squared covariances coincide, so S_beta returns it.
        let d = fixtures::small();
        let x = [0.4, -0.3, 0.2];
        let multi = Objective::DiMulti {
            attribute: 0,
            beta: 8.0,
        };
        let binary = Objective::DiBinary { attribute: 0 };
        let a = multi.value(&d, &x, None);
        let b = binary.value(&d, &x, None);
        assert!((a - b).abs() < 1e-15, "{a} vs {b}");
    }

    #[test]
    fn fnr_examples() {
        let beta = 8.0;
        // negatives contribute the constant soft_min0(0) = -ln2/beta
        let d = one_feature(&[(1.0, 0, -1), (1.0, 1, -1), (1.0, 1, 1)]);
        let cov = fnr_covariance(&d, &[0.0, 3.0], 0, beta, None);
        // positive sample at margin 3: soft_min0 ~ 0
        let mean = 2.0 / 3.0;
        let expected =
            ((0.0 - mean) * (-(2f64.ln()) / beta) + (1.0 - mean) * (-(2f64.ln()) / beta)) / 3.0;
        assert!((cov - expected).abs() < 2e-11);

        let flat = one_feature(&[(1.0, 1, -1), (-2.0, 1, 1)]);
        let o = Objective::EqualOppFnr { attribute: 0, beta };
        assert_eq!(o.value(&flat, &[1.0, 0.5], None), 0.0);
    }

    #[test]
    fn fnr_needs_positive_labels() {
        let d = one_feature(&[(1.0, 0, -1), (1.0, 1, -1)]);
        let spec = ObjectiveSpec::EqualOppFnr {
            attribute: "a".into(),
            beta: 8.0,
        };
        assert!(Objective::bind(&spec, &d).is_err());
    }

    #[test]
    fn objective_set_validation() {
        let one = vec![ObjectiveSpec::LogisticLoss { lambda_reg: 0.0 }];
        assert!(ObjectiveSet::new(one).is_err());
        let bad_beta = vec![
            ObjectiveSpec::LogisticLoss { lambda_reg: 0.0 },
            ObjectiveSpec::DiMulti {
                attribute: "r".into(),
                beta: 0.0,
            },
        ];
        assert!(ObjectiveSet::new(bad_beta).is_err());
    }

    #[test]
    fn spec_json_shape() {
        let json = r#"[{"kind":"logistic_loss","lambda_reg":0.5},
                       {"kind":"di_binary","attribute":"gender"},
                       {"kind":"di_multi","attribute":"race"}]"#;
        let specs: Vec<ObjectiveSpec> = serde_json::from_str(json).unwrap();
        assert_eq!(specs[0], ObjectiveSpec::LogisticLoss { lambda_reg: 0.5 });
        assert_eq!(
            specs[2],
            ObjectiveSpec::DiMulti {
                attribute: "race".into(),
                beta: 8.0
            }
        );
        let bad = r#"{"kind":"di_binary","attribute":"g","beta":3}"#;
        assert!(serde_json::from_str::<ObjectiveSpec>(bad).is_err());
    }

    #[test]
    fn batch_uses_full_data_mean() {
        let d = fixtures::small();
        let x = [0.3, 0.8, -0.1];
        let batch = [1usize, 3];
        let cache = d.indicators(0);
        let mean = cache.means[1];
        let by_hand = [1usize, 3]
            .iter()
            .map(|&j| {
                (cache.columns[1][j] - mean) * margin(&x[..2], x[2], &d.samples()[j].features)
            })
            .sum::<f64>()
            / 2.0;
        assert!((boundary_covariance(&d, &x, 0, 1, Some(&batch)) - by_hand).abs() < 1e-15);
    }

    fn random_point(seed: u64) -> (Dataset, Vec<f64>) {
        use rand::Rng;
        let mut rng = crate::rng::seeded(seed);
        let n = 40;
        let samples = (0..n)
            .map(|_| Sample {
                features: (0..3).map(|_| rng.random_range(-2.0..2.0)).collect(),
                sensitive: vec![rng.random_range(0..2), rng.random_range(0..3)],
                label: if rng.random::<bool>() { 1 } else { -1 },
            })
            .collect();
        let d = Dataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![true; 3],
            vec![
                Attribute::new("g", &["0", "1"]),
                Attribute::new("r", &["0", "1", "2"]),
            ],
            samples,
        )
        .unwrap();
        let x = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        (d, x)
    }

    proptest! {
        #[test]
        fn logistic_loss_is_convex(seed in any::<u64>(), t in 0.0f64..1.0) {
            use rand::Rng;
            let (d, u) = random_point(seed);
            let mut rng = crate::rng::seeded(seed ^ 1);
            let v: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            let mid: Vec<f64> = u.iter().zip(&v).map(|(a, b)| t * a + (1.0 - t) * b).collect();
            let f = |x: &[f64]| logistic_loss(&d, x, 0.1, None);
            prop_assert!(f(&mid) <= t * f(&u) + (1.0 - t) * f(&v) + 1e-12);
        }

        #[test]
        fn binary_di_is_label_swap_invariant(seed in any::<u64>()) {
            let (d, x) = random_point(seed);
            let swapped: Vec<Sample> = d.samples().iter().map(|s| Sample {
                sensitive: vec![1 - s.sensitive[0], s.sensitive[1]],
                ..s.clone()
            }).collect();
            let e = Dataset::new(d.feature_names().to_vec(), d.continuous().to_vec(), d.attributes().to_vec(), swapped).unwrap();
            let o = Objective::DiBinary { attribute: 0 };
            prop_assert!((o.value(&d, &x, None) - o.value(&e, &x, None)).abs() < 1e-14);
            let m = Objective::DiMulti { attribute: 0, beta: 8.0 };
            prop_assert!((m.value(&d, &x, None) - m.value(&e, &x, None)).abs() < 1e-14);
        }

        #[test]
        fn fnr_objective_is_nonnegative(seed in any::<u64>()) {
            let (d, x) = random_point(seed);
            let o = Objective::EqualOppFnr { attribute: 0, beta: 8.0 };
            prop_assert!(o.value(&d, &x, None) >= 0.0);
        }
    }
}
