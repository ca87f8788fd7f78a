//! MAE, MSE, RMSE and the coefficient of determination.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("metric needs at least one value")]
    Empty,
    #[error("length mismatch: {actual} actual vs {predicted} predicted values")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("R\u{b2} undefined for constant target")]
    ConstantTarget,
}

fn check(actual: &[f64], predicted: &[f64]) -> Result<(), MetricError> {
    if actual.len() != predicted.len() {
        return Err(MetricError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(MetricError::Empty);
    }
    if let Some(i) = actual
        .iter()
        .zip(predicted)
        .position(|(a, p)| !a.is_finite() || !p.is_finite())
    {
        return Err(MetricError::NonFinite(i));
    }
    Ok(())
}

pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricError> {
    check(actual, predicted)?;
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).abs())
        .sum();
    Ok(sum / actual.len() as f64)
}

pub fn mse(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricError> {
    check(actual, predicted)?;
    Ok(sse(actual, predicted) / actual.len() as f64)
}

pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricError> {
    mse(actual, predicted).map(f64::sqrt)
}

/// `1 - SS_res / SS_tot`, with `SS_tot` taken about the mean of `actual`.
pub fn r2(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricError> {
    check(actual, predicted)?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(MetricError::ConstantTarget);
    }
    Ok(1.0 - sse(actual, predicted) / ss_tot)
}

fn sse(actual: &[f64], predicted: &[f64]) -> f64 {
    actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).powi(2))
        .sum()
}

/// The four scores reported for a train or test split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub r2: f64,
}

impl EvalReport {
    pub fn compute(actual: &[f64], predicted: &[f64]) -> Result<Self, MetricError> {
        let mse = mse(actual, predicted)?;
        Ok(Self {
            mae: mae(actual, predicted)?,
            mse,
            rmse: mse.sqrt(),
            r2: r2(actual, predicted)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mae_examples() {
        assert_eq!(mae(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(mae(&[0.0, 0.0], &[1.0, -1.0]).unwrap(), 1.0);
        assert!((mae(&[3.5, 4.0], &[3.6, 4.2]).unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn mse_rmse_examples() {
        assert_eq!(mse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(rmse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mse(&[4.0, 5.0], &[4.0, 5.0]).unwrap(), 0.0);
        assert_eq!(mse(&[1.0, 2.0], &[2.0, 4.0]).unwrap(), 2.5);
        assert!((rmse(&[1.0, 2.0], &[2.0, 4.0]).unwrap() - 1.5811388300841898).abs() < 1e-12);
    }

    #[test]
    fn r2_examples() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(r2(&a, &a).unwrap(), 1.0);
        assert_eq!(r2(&a, &[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert_eq!(r2(&a, &[1.0, 2.0, 4.0]).unwrap(), 0.5);
    }

    #[test]
    fn error_paths() {
        assert_eq!(mae(&[], &[]), Err(MetricError::Empty));
        assert_eq!(
            mse(&[1.0], &[1.0, 2.0]),
            Err(MetricError::LengthMismatch {
                actual: 1,
                predicted: 2
            })
        );
        assert_eq!(
            r2(&[5.0, 5.0], &[5.0, 4.0]),
            Err(MetricError::ConstantTarget)
        );
        assert_eq!(
            r2(&[5.0, 5.0], &[5.0, 4.0]).unwrap_err().to_string(),
            "R\u{b2} undefined for constant target"
        );
        assert_eq!(
            mae(&[1.0, f64::NAN], &[1.0, 1.0]),
            Err(MetricError::NonFinite(1))
        );
    }

    fn pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..40).prop_flat_map(|n| {
            (
                prop::collection::vec(-100.0f64..100.0, n),
                prop::collection::vec(-100.0f64..100.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn rmse_squared_is_mse((a, p) in pairs()) {
            let r = rmse(&a, &p).unwrap();
            let m = mse(&a, &p).unwrap();
            prop_assert!((r * r - m).abs() <= 1e-12 * m.max(1.0));
        }

        #[test]
        fn mae_bounded_by_rmse((a, p) in pairs()) {
            prop_assert!(mae(&a, &p).unwrap() <= rmse(&a, &p).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn permutation_invariant((a, p) in pairs(), rot in 0usize..40) {
            let k = rot % a.len();
            let (mut a2, mut p2) = (a.clone(), p.clone());
            a2.rotate_left(k);
            p2.rotate_left(k);
            let x = EvalReport::compute(&a, &p).unwrap();
            let y = EvalReport::compute(&a2, &p2).unwrap();
            prop_assert!((x.mae - y.mae).abs() < 1e-9);
            prop_assert!((x.mse - y.mse).abs() < 1e-9);
            prop_assert!((x.r2 - y.r2).abs() < 1e-9);
        }

        #[test]
        fn translation_invariant((a, p) in pairs(), c in -50.0f64..50.0) {
            let a2: Vec<f64> = a.iter().map(|v| v + c).collect();
            let p2: Vec<f64> = p.iter().map(|v| v + c).collect();
            prop_assert!((mae(&a, &p).unwrap() - mae(&a2, &p2).unwrap()).abs() < 1e-9);
            prop_assert!((mse(&a, &p).unwrap() - mse(&a2, &p2).unwrap()).abs() < 1e-7);
        }
    }
}
