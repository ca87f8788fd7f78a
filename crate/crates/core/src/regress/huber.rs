//! Huber M-estimation by iteratively reweighted least squares.
//!
//! Each Huber pass rescales the current residuals by
//! `s = MAD(r) / 0.6745` and refits with weights `1` for `|r|/s <= delta` and
//! `delta * s / |r|` beyond. The passes start from a least-absolute-deviation
//! fit rather than from OLS: a high-leverage outlier drags the OLS line far
//! enough that the first MAD hides it, and IRLS then creeps toward the robust
//! solution by a few thousandths per pass.

use serde::{Deserialize, Serialize};

use super::linear::{require_rows, Estimator, FitSummary, LinearModel};
use super::{check_training, ModelError};
use crate::dataset::StandardScaler;
use crate::linalg::{dot, least_squares, Matrix};

/// Normal-consistency constant for the median absolute deviation.
pub const MAD_CONSISTENCY: f64 = 0.6745;

/// Residuals below this fraction of `max|y|` count as an exact fit.
const EXACT_FIT_RTOL: f64 = 1e-12;
/// Floor on the residual scale, relative to the scale of the OLS residuals.
const SCALE_FLOOR_RTOL: f64 = 1e-9;
/// L1 weights are `1 / max(|r|, LAD_SMOOTHING * s_ols)`.
const LAD_SMOOTHING: f64 = 1e-8;
const LAD_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HuberConfig {
    /// Residual threshold in robust-scale units.
    pub delta: f64,
    pub max_iterations: usize,
    /// Stop once no coefficient moves by more than this between passes.
    pub tolerance: f64,
}

impl Default for HuberConfig {
    fn default() -> Self {
        Self {
            delta: 1.345,
            max_iterations: 100,
            tolerance: 1e-8,
        }
    }
}

impl HuberConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.delta.is_nan() || self.delta <= 0.0 {
            return Err(ModelError::InvalidConfig(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(ModelError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(ModelError::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median absolute deviation about the median, divided by 0.6745.
pub fn mad_scale(residuals: &[f64]) -> f64 {
    let mut r = residuals.to_vec();
    let center = median(&mut r);
    let mut dev: Vec<f64> = residuals.iter().map(|v| (v - center).abs()).collect();
    median(&mut dev) / MAD_CONSISTENCY
}

pub fn huber_weight(residual: f64, scale: f64, delta: f64) -> f64 {
    let u = residual.abs() / scale;
    if u <= delta {
        1.0
    } else {
        delta / u
    }
}

fn residuals(design: &Matrix, y: &[f64], beta: &[f64]) -> Vec<f64> {
    design
        .iter_rows()
        .zip(y)
        .map(|(row, yi)| yi - dot(row, beta))
        .collect()
}

fn max_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Huber regression. Features are standardized internally; the target is
/// left in millimeters since the MAD scale already normalizes residuals.
pub fn fit_huber(
    features: &Matrix,
    targets: &[f64],
    cfg: &HuberConfig,
) -> Result<LinearModel, ModelError> {
    cfg.validate()?;
    check_training(features, targets)?;
    require_rows(features)?;
    let scaler = StandardScaler::fit(features)?;
    let design = scaler.transform(features).with_intercept();

    let mut beta = least_squares(&design, targets, None)?;
    let finish = |beta: Vec<f64>, iterations, converged| LinearModel {
        intercept: beta[0],
        weights: beta[1..].to_vec(),
        scaler: Some(scaler.clone()),
        target_scale: None,
        estimator: Estimator::Robust(*cfg),
        summary: FitSummary {
            iterations,
            converged,
        },
    };

    let r = residuals(&design, targets, &beta);
    let y_mag = targets.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    if r.iter().all(|v| v.abs() <= EXACT_FIT_RTOL * y_mag) {
        return Ok(finish(beta, 0, true));
    }
    let s_ols = mad_scale(&r);
    if s_ols == 0.0 {
        return Err(ModelError::DegenerateScale);
    }

    // least-absolute-deviation start
    let eta = LAD_SMOOTHING * s_ols;
    for _ in 0..LAD_MAX_ITER {
        let w: Vec<f64> = residuals(&design, targets, &beta)
            .iter()
            .map(|r| 1.0 / r.abs().max(eta))
            .collect();
        let next = least_squares(&design, targets, Some(&w))?;
        let step = max_change(&next, &beta);
        beta = next;
        if step <= 1e-10 * (1.0 + beta.iter().fold(0.0, |m: f64, b| m.max(b.abs()))) {
            break;
        }
    }

    let floor = SCALE_FLOOR_RTOL * s_ols;
    for iter in 1..=cfg.max_iterations {
        let r = residuals(&design, targets, &beta);
        let s = mad_scale(&r).max(floor);
        let w: Vec<f64> = r.iter().map(|ri| huber_weight(*ri, s, cfg.delta)).collect();
        let next = least_squares(&design, targets, Some(&w))?;
        let step = max_change(&next, &beta);
        beta = next;
        if step < cfg.tolerance {
            return Ok(finish(beta, iter, true));
        }
    }
    Ok(finish(beta, cfg.max_iterations, false))
}
