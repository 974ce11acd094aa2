//! Synthetic two-feature data with a built-in accuracy/fairness conflict.
//!
//! Labels are uniform on {-1, +1}; features come from a class-conditional
//! Gaussian; the binary attribute is Bernoulli with success probability equal
//! to the positive-class posterior of the *rotated* feature vector, so the
//! attribute correlates with the label-informative direction.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Attribute, Dataset, Sample};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticConfig {
    pub n: usize,
    pub mean_pos: [f64; 2],
    pub cov_pos: [[f64; 2]; 2],
    pub mean_neg: [f64; 2],
    pub cov_neg: [[f64; 2]; 2],
    /// Rotation (radians) applied to a feature vector before computing the
    /// attribute probability.
    pub rotation: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n: 2000,
            mean_pos: [2.0, 2.0],
            cov_pos: [[5.0, 1.0], [1.0, 5.0]],
            mean_neg: [-2.0, -2.0],
            cov_neg: [[10.0, 1.0], [1.0, 3.0]],
            rotation: std::f64::consts::FRAC_PI_4,
        }
    }
}

struct Gaussian2 {
    mean: [f64; 2],
    // lower Cholesky factor
    l11: f64,
    l21: f64,
    l22: f64,
    inv: [[f64; 2]; 2],
    log_norm: f64,
}

impl Gaussian2 {
    fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
        if cov[0][1] != cov[1][0] || cov[0][0] <= 0.0 || det <= 0.0 {
            return Err(Error::invalid(format!(
                "covariance {cov:?} is not symmetric positive definite"
            )));
        }
        let l11 = cov[0][0].sqrt();
        let l21 = cov[1][0] / l11;
        let l22 = (cov[1][1] - l21 * l21).sqrt();
        let inv = [
            [cov[1][1] / det, -cov[0][1] / det],
            [-cov[1][0] / det, cov[0][0] / det],
        ];
        let log_norm = -(2.0 * std::f64::consts::PI).ln() - 0.5 * det.ln();
        Ok(Gaussian2 {
            mean,
            l11,
            l21,
            l22,
            inv,
            log_norm,
        })
    }

    fn sample(&self, rng: &mut rng::Rng) -> [f64; 2] {
        let e1: f64 = StandardNormal.sample(rng);
        let e2: f64 = StandardNormal.sample(rng);
        [
            self.mean[0] + self.l11 * e1,
            self.mean[1] + self.l21 * e1 + self.l22 * e2,
        ]
    }

    fn log_pdf(&self, z: [f64; 2]) -> f64 {
        let d = [z[0] - self.mean[0], z[1] - self.mean[1]];
        let q = d[0] * (self.inv[0][0] * d[0] + self.inv[0][1] * d[1])
            + d[1] * (self.inv[1][0] * d[0] + self.inv[1][1] * d[1]);
        self.log_norm - 0.5 * q
    }
}

/// `n` samples from the default configuration.
pub fn generate_synthetic(n: usize, seed: u64) -> Result<Dataset> {
    let cfg = SyntheticConfig {
        n,
        ..SyntheticConfig::default()
    };
    cfg.generate(seed)
}

impl SyntheticConfig {
    pub fn generate(&self, seed: u64) -> Result<Dataset> {
        if self.n == 0 {
            return Err(Error::invalid("synthetic dataset needs n >= 1"));
        }
        let pos = Gaussian2::new(self.mean_pos, self.cov_pos)?;
        let neg = Gaussian2::new(self.mean_neg, self.cov_neg)?;
        let (sin, cos) = self.rotation.sin_cos();
        let mut rng = rng::seeded(seed);
        let samples = (0..self.n)
            .map(|_| {
                let label: i8 = if rng.random::<bool>() { 1 } else { -1 };
                let z = if label > 0 {
                    pos.sample(&mut rng)
                } else {
                    neg.sample(&mut rng)
                };
                let zr = [cos * z[0] - sin * z[1], sin * z[0] + cos * z[1]];
                // posterior of the positive class at the rotated point
                let p = 1.0 / (1.0 + (neg.log_pdf(zr) - pos.log_pdf(zr)).exp());
                let a = usize::from(rng.random::<f64>() < p);
                Sample {
                    features: z.to_vec(),
                    sensitive: vec![a],
                    label,
                }
            })
            .collect();
        Dataset::new(
            vec!["z0".into(), "z1".into()],
            vec![true, true],
            vec![Attribute::new("a", &["0", "1"])],
            samples,
        )
    }
}
