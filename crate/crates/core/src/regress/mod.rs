//! Penetration-depth regressors.
//!
//! Three linear estimators share [`LinearModel`]: ordinary least squares, a
//! Huber M-estimator solved by iteratively reweighted least squares, and a
//! linear epsilon-insensitive SVR solved by dual coordinate descent. The
//! fourth model is a bagged forest of CART regression trees.

mod forest;
mod huber;
mod linear;
mod persist;
mod svr;

pub use forest::{Forest, ForestConfig, Node, Tree};
pub use huber::{fit_huber, HuberConfig};
pub use linear::{fit_ols, Estimator, FitSummary, LinearModel, TargetScale};
pub use persist::{load_model, save_model, MODEL_FORMAT, MODEL_VERSION};
pub use svr::{fit_svr, SvrConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::DatasetError;
use crate::linalg::{LinalgError, Matrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("need at least {needed} rows to fit {params} parameters, got {rows}")]
    TooFewRows {
        rows: usize,
        params: usize,
        needed: usize,
    },
    #[error("{features} feature rows but {targets} targets")]
    TargetLength { features: usize, targets: usize },
    #[error("non-finite training value")]
    NonFiniteData,
    #[error("singular system: design matrix is rank deficient")]
    Singular,
    #[error("degenerate residual scale: MAD is zero while residuals are not")]
    DegenerateScale,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("model expects {expected} features, got {found}")]
    FeatureCount { expected: usize, found: usize },
    #[error("prediction input must be finite")]
    NonFiniteInput,
    #[error("cannot load model: {0}")]
    Load(String),
    #[error("model file version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

impl From<LinalgError> for ModelError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::RankDeficient => ModelError::Singular,
            other => ModelError::InvalidConfig(other.to_string()),
        }
    }
}

/// Anything that maps a feature row to a depth in millimeters.
pub trait Predict {
    fn n_features(&self) -> usize;

    /// Prediction for a single feature row, checked for width and finiteness.
    fn predict(&self, x: &[f64]) -> Result<f64, ModelError>;

    fn predict_matrix(&self, features: &Matrix) -> Result<Vec<f64>, ModelError> {
        features.iter_rows().map(|r| self.predict(r)).collect()
    }
}

pub(crate) fn check_input(x: &[f64], expected: usize) -> Result<(), ModelError> {
    if x.len() != expected {
        return Err(ModelError::FeatureCount {
            expected,
            found: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFiniteInput);
    }
    Ok(())
}

pub(crate) fn check_training(features: &Matrix, targets: &[f64]) -> Result<(), ModelError> {
    if features.rows() != targets.len() {
        return Err(ModelError::TargetLength {
            features: features.rows(),
            targets: targets.len(),
        });
    }
    if features
        .as_slice()
        .iter()
        .chain(targets)
        .any(|v| !v.is_finite())
    {
        return Err(ModelError::NonFiniteData);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ols,
    Robust,
    Svr,
    Forest,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ols => "ols",
            ModelKind::Robust => "robust",
            ModelKind::Svr => "svr",
            ModelKind::Forest => "forest",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Hyperparameters for every model kind; only the selected kind's block is read.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainConfig {
    pub huber: HuberConfig,
    pub svr: SvrConfig,
    pub forest: ForestConfig,
}

/// A trained regressor of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Linear(LinearModel),
    Forest(Forest),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Linear(m) => m.estimator().kind(),
            Model::Forest(_) => ModelKind::Forest,
        }
    }
}

impl Predict for Model {
    fn n_features(&self) -> usize {
        match self {
            Model::Linear(m) => m.n_features(),
            Model::Forest(f) => f.n_features(),
        }
    }

    fn predict(&self, x: &[f64]) -> Result<f64, ModelError> {
        match self {
            Model::Linear(m) => m.predict(x),
            Model::Forest(f) => f.predict(x),
        }
    }
}

/// Fits the requested model kind.
pub fn train(
    kind: ModelKind,
    features: &Matrix,
    targets: &[f64],
    cfg: &TrainConfig,
) -> Result<Model, ModelError> {
    Ok(match kind {
        ModelKind::Ols => Model::Linear(fit_ols(features, targets)?),
        ModelKind::Robust => Model::Linear(fit_huber(features, targets, &cfg.huber)?),
        ModelKind::Svr => Model::Linear(fit_svr(features, targets, &cfg.svr)?),
        ModelKind::Forest => Model::Forest(Forest::fit(features, targets, &cfg.forest)?),
    })
}
