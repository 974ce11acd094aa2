use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng;

/// Train/validation/test fractions plus the shuffle seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train: 0.6,
            valid: 0.1,
            test: 0.3,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let f = [self.train, self.valid, self.test];
        if f.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(format!(
                "split fractions {f:?} must be nonnegative"
            )));
        }
        if (f.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "split fractions {f:?} must sum to 1"
            )));
        }
        Ok(())
    }

    /// Part sizes for `n` samples; the test part takes the rounding remainder.
    pub fn sizes(&self, n: usize) -> Result<[usize; 3]> {
        self.validate()?;
        let train = (self.train * n as f64).round() as usize;
        let valid = (self.valid * n as f64).round() as usize;
        let test = n
            .checked_sub(train + valid)
            .ok_or_else(|| Error::invalid(format!("cannot split {n} samples as {self:?}")))?;
        let sizes = [train, valid, test];
        for (size, (frac, name)) in sizes.iter().zip(
            [self.train, self.valid, self.test]
                .iter()
                .zip(["train", "valid", "test"]),
        ) {
            if *frac > 0.0 && *size == 0 {
                return Err(Error::invalid(format!(
                    "{name} part is empty for n={n}; dataset too small for {self:?}"
                )));
            }
        }
        Ok(sizes)
    }
}

/// Shuffled index sets of the three parts.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<[Vec<usize>; 3]> {
    let [train, valid, _] = spec.sizes(n)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::seeded(spec.seed));
    let test = idx.split_off(train + valid);
    let valid = idx.split_off(train);
    Ok([idx, valid, test])
}

/// Disjoint seed-deterministic partition into (train, valid, test).
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset, Dataset)> {
    let [a, b, c] = split_indices(data.len(), spec)?;
    Ok((data.subset(&a), data.subset(&b), data.subset(&c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ten_samples_split_six_one_three() {
        let spec = SplitSpec::default();
        assert_eq!(spec.sizes(10).unwrap(), [6, 1, 3]);
    }

    #[test]
    fn too_small_is_error() {
        assert!(SplitSpec::default().sizes(3).is_err());
        let bad = SplitSpec {
            train: 0.5,
            valid: 0.5,
            test: 0.5,
            seed: 0,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_fraction_part_may_be_empty() {
        let spec = SplitSpec {
            train: 1.0,
            valid: 0.0,
            test: 0.0,
            seed: 1,
        };
        assert_eq!(spec.sizes(5).unwrap(), [5, 0, 0]);
    }

    proptest! {
        #[test]
        fn split_is_a_reproducible_partition(n in 10usize..500, seed in any::<u64>()) {
            let spec = SplitSpec { seed, ..SplitSpec::default() };
            let parts = split_indices(n, &spec).unwrap();
            prop_assert_eq!(&parts, &split_indices(n, &spec).unwrap());
            let mut all: Vec<usize> = parts.iter().flatten().copied().collect();
            prop_assert_eq!(all.len(), n);
            all.sort_unstable();
            all.dedup();
            prop_assert_eq!(all.len(), n);
        }
    }
}
