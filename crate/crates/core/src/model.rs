//! Linear binary classifier `z -> sign(c·z + b)`.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub c: Vec<f64>,
    pub b: f64,
}

impl LinearModel {
    pub fn zeros(dim: usize) -> Self {
        LinearModel {
            c: vec![0.0; dim],
            b: 0.0,
        }
    }

    /// Splits a flat parameter vector `(c_0, .., c_{d-1}, b)`.
    pub fn from_params(x: &[f64]) -> Result<Self> {
        let (b, c) = x
            .split_last()
            .ok_or_else(|| Error::invalid("parameter vector is empty"))?;
        Ok(LinearModel {
            c: c.to_vec(),
            b: *b,
        })
    }

    pub fn params(&self) -> Vec<f64> {
        let mut x = self.c.clone();
        x.push(self.b);
        x
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn margin(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.c.len() {
            return Err(Error::DimensionMismatch {
                expected: self.c.len(),
                got: z.len(),
            });
        }
        Ok(margin(&self.c, self.b, z))
    }

    /// +1 when the margin is nonnegative (ties go to the positive class).
    pub fn predict(&self, z: &[f64]) -> Result<i8> {
        Ok(sign(self.margin(z)?))
    }

    /// Fraction of samples classified correctly.
    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::invalid("accuracy of an empty dataset"));
        }
        let mut correct = 0usize;
        for s in data.samples() {
            if self.predict(&s.features)? == s.label {
                correct += 1;
            }
        }
        Ok(correct as f64 / data.len() as f64)
    }
}

#[inline]
pub(crate) fn margin(c: &[f64], b: f64, z: &[f64]) -> f64 {
    c.iter().zip(z).map(|(ci, zi)| ci * zi).sum::<f64>() + b
}

#[inline]
pub(crate) fn sign(m: f64) -> i8 {
    if m >= 0.0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, Sample};
    use proptest::prelude::*;

    fn data(rows: &[(f64, i8)]) -> Dataset {
        let samples = rows
            .iter()
            .map(|&(z, y)| Sample {
                features: vec![z],
                sensitive: vec![0],
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
    fn margin_examples() {
        let zero = LinearModel::zeros(2);
        assert_eq!(zero.margin(&[3.0, -7.0]).unwrap(), 0.0);
        let m = LinearModel {
            c: vec![1.0, -1.0],
            b: 0.5,
        };
        assert_eq!(m.margin(&[2.0, 1.0]).unwrap(), 1.5);
        assert!(matches!(
            m.margin(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn predict_examples() {
        let m = |b| LinearModel { c: vec![0.0], b };
        assert_eq!(m(0.0).predict(&[1.0]).unwrap(), 1);
        assert_eq!(m(-0.1).predict(&[1.0]).unwrap(), -1);
        assert_eq!(m(3.7).predict(&[1.0]).unwrap(), 1);
    }

    #[test]
    fn accuracy_examples() {
        let ident = LinearModel {
            c: vec![1.0],
            b: 0.0,
        };
        let d = data(&[(1.0, 1), (-1.0, -1), (2.0, 1)]);
        assert_eq!(ident.accuracy(&d).unwrap(), 1.0);

        let always_pos = LinearModel {
            c: vec![0.0],
            b: 1.0,
        };
        let neg = data(&[(1.0, -1), (2.0, -1)]);
        assert_eq!(always_pos.accuracy(&neg).unwrap(), 0.0);

        let d = data(&[(1.0, 1), (-1.0, -1), (2.0, 1), (0.5, -1)]);
        assert_eq!(ident.accuracy(&d).unwrap(), 0.75);

        let empty = data(&[]);
        assert!(ident.accuracy(&empty).is_err());
    }

    #[test]
    fn params_round_trip() {
        let m = LinearModel {
            c: vec![1.0, 2.0],
            b: 3.0,
        };
        assert_eq!(m.params(), vec![1.0, 2.0, 3.0]);
        assert_eq!(LinearModel::from_params(&m.params()).unwrap(), m);
        assert!(LinearModel::from_params(&[]).is_err());
    }

    proptest! {
        #[test]
        fn positive_scaling_preserves_prediction(
            c in prop::collection::vec(-5.0f64..5.0, 3),
            b in -5.0f64..5.0,
            z in prop::collection::vec(-5.0f64..5.0, 3),
            s in 0.01f64..100.0,
        ) {
            let m = LinearModel { c: c.clone(), b };
            let scaled = LinearModel { c: c.iter().map(|v| v * s).collect(), b: b * s };
            let m0 = m.margin(&z).unwrap();
            // exact zero crossings can flip under rounding
            prop_assume!(m0.abs() > 1e-9);
            prop_assert_eq!(m.predict(&z).unwrap(), scaled.predict(&z).unwrap());
        }

        #[test]
        fn margin_is_linear_without_intercept(
            c in prop::collection::vec(-5.0f64..5.0, 3),
            z1 in prop::collection::vec(-5.0f64..5.0, 3),
            z2 in prop::collection::vec(-5.0f64..5.0, 3),
        ) {
            let m = LinearModel { c, b: 0.0 };
            let sum: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| a + b).collect();
            let lhs = m.margin(&sum).unwrap();
            let rhs = m.margin(&z1).unwrap() + m.margin(&z2).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
