//! Linear epsilon-insensitive support vector regression.
//!
//! Primal: `min 1/2 |w|^2 + C sum_i max(0, |y_i - w.x_i - b| - eps)`.
//! It is solved in the dual,
//!
//! ```text
//! min_beta  1/2 beta' Q beta - y' beta + eps |beta|_1,   -C <= beta_i <= C
//! ```
//!
//! with `Q = X X'` and `w = sum_i beta_i x_i`, one coordinate at a time. The
//! intercept rides along as a constant feature of value 1, which puts `b^2/2`
//! into the regularizer; with standardized features and target the optimal
//! `b` is near zero and the extra term is negligible against `C`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linear::{require_rows, Estimator, FitSummary, LinearModel, TargetScale};
use super::{check_training, ModelError};
use crate::dataset::StandardScaler;
use crate::linalg::{dot, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrConfig {
    pub c: f64,
    /// Tube half-width, in standardized target units.
    pub epsilon: f64,
    /// Converged once a full pass moves no dual coordinate by more than this.
    pub tolerance: f64,
    pub max_passes: usize,
    /// Seeds the per-pass coordinate permutation.
    pub seed: u64,
}

impl Default for SvrConfig {
    fn default() -> Self {
        Self {
            c: 100.0,
            epsilon: 0.1,
            tolerance: 1e-6,
            max_passes: 10_000,
            seed: 0,
        }
    }
}

impl SvrConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(ModelError::InvalidConfig(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(ModelError::InvalidConfig(format!(
                "epsilon must be nonnegative, got {}",
                self.epsilon
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(ModelError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_passes == 0 {
            return Err(ModelError::InvalidConfig(
                "max_passes must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Dual solution in standardized space, bias as the last weight.
pub(crate) struct DualSolution {
    pub w: Vec<f64>,
    // read by the KKT checks in tests
    #[cfg_attr(not(test), allow(dead_code))]
    pub beta: Vec<f64>,
    pub passes: usize,
    pub converged: bool,
}

/// Coordinate descent on the box-constrained dual. Rows of `z` already carry
/// the trailing bias feature.
pub(crate) fn solve_dual(z: &Matrix, y: &[f64], cfg: &SvrConfig) -> DualSolution {
    let (n, p) = (z.rows(), z.cols());
    let q_diag: Vec<f64> = z.iter_rows().map(|r| dot(r, r)).collect();
    let mut beta = vec![0.0; n];
    let mut w = vec![0.0; p];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    for pass in 1..=cfg.max_passes {
        order.shuffle(&mut rng);
        let mut largest = 0.0f64;
        for &i in &order {
            let qii = q_diag[i];
            if qii <= 0.0 {
                continue;
            }
            let row = z.row(i);
            let g = dot(&w, row) - y[i];
            let (gp, gn) = (g + cfg.epsilon, g - cfg.epsilon);
            let b = beta[i];
            let target = if gp < qii * b {
                b - gp / qii
            } else if gn > qii * b {
                b - gn / qii
            } else {
                0.0
            };
            let next = target.clamp(-cfg.c, cfg.c);
            let d = next - b;
            if d != 0.0 {
                beta[i] = next;
                for (wj, xj) in w.iter_mut().zip(row) {
                    *wj += d * xj;
                }
                largest = largest.max(d.abs());
            }
        }
        if largest <= cfg.tolerance {
            return DualSolution {
                w,
                beta,
                passes: pass,
                converged: true,
            };
        }
    }
    DualSolution {
        w,
        beta,
        passes: cfg.max_passes,
        converged: false,
    }
}

/// Linear SVR. Running out of passes is not an error; the last iterate is
/// returned with `summary().converged == false`.
pub fn fit_svr(
    features: &Matrix,
    targets: &[f64],
    cfg: &SvrConfig,
) -> Result<LinearModel, ModelError> {
    cfg.validate()?;
    check_training(features, targets)?;
    require_rows(features)?;
    let scaler = StandardScaler::fit(features)?;
    let p = features.cols();

    let n = targets.len() as f64;
    let mean = targets.iter().sum::<f64>() / n;
    let std = (targets.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if std.is_nan() || std <= 1e-12 * mean.abs().max(1.0) {
        // constant target: every residual already sits inside the tube
        return Ok(LinearModel {
            weights: vec![0.0; p],
            intercept: mean,
            scaler: Some(scaler),
            target_scale: None,
            estimator: Estimator::Svr(*cfg),
            summary: FitSummary {
                iterations: 0,
                converged: true,
            },
        });
    }
    let ys: Vec<f64> = targets.iter().map(|v| (v - mean) / std).collect();

    let standardized = scaler.transform(features);
    let mut data = Vec::with_capacity(standardized.rows() * (p + 1));
    for row in standardized.iter_rows() {
        data.extend_from_slice(row);
        data.push(1.0);
    }
    let z = Matrix::from_row_major(standardized.rows(), p + 1, data).expect("augmented shape");

    let sol = solve_dual(&z, &ys, cfg);
    Ok(LinearModel {
        weights: sol.w[..p].to_vec(),
        intercept: sol.w[p],
        scaler: Some(scaler),
        target_scale: Some(TargetScale { mean, std }),
        estimator: Estimator::Svr(*cfg),
        summary: FitSummary {
            iterations: sol.passes,
            converged: sol.converged,
        },
    })
}
