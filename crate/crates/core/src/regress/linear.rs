use serde::{Deserialize, Serialize};

use super::{check_input, check_training, HuberConfig, ModelError, ModelKind, Predict, SvrConfig};
use crate::dataset::StandardScaler;
use crate::linalg::{dot, least_squares, Matrix};

/// Affine map back from a standardized target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetScale {
    pub mean: f64,
    pub std: f64,
}

/// Which estimator produced a [`LinearModel`], with the configuration used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Estimator {
    Ols,
    Robust(HuberConfig),
    Svr(SvrConfig),
}

impl Estimator {
    pub fn kind(&self) -> ModelKind {
        match self {
            Estimator::Ols => ModelKind::Ols,
            Estimator::Robust(_) => ModelKind::Robust,
            Estimator::Svr(_) => ModelKind::Svr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitSummary {
    pub iterations: usize,
    pub converged: bool,
}

/// `depth = w . scale(x) + b`, optionally mapped back through a target scale.
///
/// When `scaler` is present the weights live in standardized feature space;
/// [`LinearModel::raw_coefficients`] folds the scaling back into physical
/// units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub(crate) weights: Vec<f64>,
    pub(crate) intercept: f64,
    pub(crate) scaler: Option<StandardScaler>,
    pub(crate) target_scale: Option<TargetScale>,
    pub(crate) estimator: Estimator,
    pub(crate) summary: FitSummary,
}

impl LinearModel {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn scaler(&self) -> Option<&StandardScaler> {
        self.scaler.as_ref()
    }

    pub fn target_scale(&self) -> Option<TargetScale> {
        self.target_scale
    }

    pub fn estimator(&self) -> &Estimator {
        &self.estimator
    }

    pub fn summary(&self) -> FitSummary {
        self.summary
    }

    /// Weights and intercept acting directly on unscaled features and
    /// producing millimeters.
    pub fn raw_coefficients(&self) -> (Vec<f64>, f64) {
        let (ts, tm) = self.target_scale.map_or((1.0, 0.0), |t| (t.std, t.mean));
        match &self.scaler {
            None => (
                self.weights.iter().map(|w| w * ts).collect(),
                self.intercept * ts + tm,
            ),
            Some(sc) => {
                let mut b = self.intercept;
                let w: Vec<f64> = self
                    .weights
                    .iter()
                    .zip(sc.means().iter().zip(sc.stds()))
                    .map(|(w, (m, s))| {
                        b -= w * m / s;
                        w / s * ts
                    })
                    .collect();
                (w, b * ts + tm)
            }
        }
    }

    /// Structural checks for models read from disk.
    pub(crate) fn validate(&self) -> Result<(), String> {
        if self.weights.is_empty() {
            return Err("linear model has no weights".into());
        }
        if !self.weights.iter().all(|w| w.is_finite()) || !self.intercept.is_finite() {
            return Err("non-finite coefficient".into());
        }
        if let Some(sc) = &self.scaler {
            if sc.n_features() != self.weights.len() {
                return Err(format!(
                    "scaler has {} features but model has {} weights",
                    sc.n_features(),
                    self.weights.len()
                ));
            }
            if StandardScaler::from_parts(sc.means().to_vec(), sc.stds().to_vec()).is_none() {
                return Err("invalid scaler parameters".into());
            }
        }
        if let Some(t) = self.target_scale {
            if !(t.mean.is_finite() && t.std.is_finite() && t.std > 0.0) {
                return Err("invalid target scale".into());
            }
        }
        Ok(())
    }
}

impl Predict for LinearModel {
    fn n_features(&self) -> usize {
        self.weights.len()
    }

    fn predict(&self, x: &[f64]) -> Result<f64, ModelError> {
        check_input(x, self.weights.len())?;
        let v = match &self.scaler {
            Some(sc) => dot(&self.weights, &sc.transform_row(x)),
            None => dot(&self.weights, x),
        } + self.intercept;
        Ok(match self.target_scale {
            Some(t) => v * t.std + t.mean,
            None => v,
        })
    }
}

pub(crate) fn require_rows(features: &Matrix) -> Result<(), ModelError> {
    let params = features.cols() + 1;
    if features.rows() < params {
        return Err(ModelError::TooFewRows {
            rows: features.rows(),
            params,
            needed: params,
        });
    }
    Ok(())
}

/// Ordinary least squares with intercept, on unscaled features.
pub fn fit_ols(features: &Matrix, targets: &[f64]) -> Result<LinearModel, ModelError> {
    check_training(features, targets)?;
    require_rows(features)?;
    let beta = least_squares(&features.with_intercept(), targets, None)?;
    Ok(LinearModel {
        intercept: beta[0],
        weights: beta[1..].to_vec(),
        scaler: None,
        target_scale: None,
        estimator: Estimator::Ols,
        summary: FitSummary {
            iterations: 1,
            converged: true,
        },
    })
}
