//! Friction-stir spot weld analytics.
//!
//! Two halves share this crate:
//!
//! * penetration-depth regression from process parameters (rotational speed,
//!   dwell time, axial force) with ordinary least squares, a Huber
//!   M-estimator, a linear epsilon-insensitive SVR and a bagged CART forest;
//! * weld-region geometry from images: grayscale conversion, histogram,
//!   thresholding, 3x3 morphology, 8-connected labeling and moment-based
//!   region properties.
//!
//! The `weldkit` binary wires both into train / evaluate / predict / analyze /
//! histogram commands.

pub mod cli;
pub mod dataset;
pub mod imgeo;
pub mod linalg;
pub mod metrics;
pub mod regress;

pub use dataset::{Dataset, DatasetError, SplitSpec, StandardScaler, WeldRecord};
pub use linalg::Matrix;
pub use metrics::{EvalReport, MetricError};
pub use regress::{
    Forest, ForestConfig, HuberConfig, LinearModel, Model, ModelError, ModelKind, Predict,
    SvrConfig, TrainConfig,
};
