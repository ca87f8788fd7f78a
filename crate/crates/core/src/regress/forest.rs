//! Bagged CART regression trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_input, check_training, ModelError, Predict};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub min_samples_leaf: usize,
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            min_samples_leaf: 1,
            max_depth: None,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_trees == 0 {
            return Err(ModelError::InvalidConfig(
                "n_trees must be at least 1".into(),
            ));
        }
        if self.min_samples_leaf == 0 {
            return Err(ModelError::InvalidConfig(
                "min_samples_leaf must be at least 1".into(),
            ));
        }
        if self.max_depth == Some(0) {
            return Err(ModelError::InvalidConfig(
                "max_depth must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Tree node; children always sit at higher indices than their parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
        samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value, .. } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    fn validate(&self, n_features: usize) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("empty tree".into());
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match *node {
                Node::Leaf { value, samples } => {
                    if !value.is_finite() || samples == 0 {
                        return Err(format!("invalid leaf at node {i}"));
                    }
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let in_range = |c: usize| c > i && c < self.nodes.len();
                    if feature >= n_features
                        || !threshold.is_finite()
                        || !in_range(left)
                        || !in_range(right)
                    {
                        return Err(format!("invalid split at node {i}"));
                    }
                }
            }
        }
        Ok(())
    }
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    cfg: &'a ForestConfig,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    sse: f64,
}

fn sse_of(idx: &[usize], y: &[f64]) -> (f64, f64) {
    let n = idx.len() as f64;
    let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / n;
    let sse = idx.iter().map(|&i| (y[i] - mean).powi(2)).sum();
    (mean, sse)
}

impl Grower<'_> {
    fn grow(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let (mean, sse) = sse_of(idx, self.y);
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: mean,
            samples: idx.len(),
        });

        let depth_capped = self.cfg.max_depth.is_some_and(|d| depth >= d);
        if depth_capped || idx.len() < 2 * self.cfg.min_samples_leaf || sse <= 0.0 {
            return at;
        }
        let Some(best) = self.best_split(idx) else {
            return at;
        };
        if best.sse >= sse * (1.0 - 1e-12) {
            return at;
        }

        let (feature, threshold) = (best.feature, best.threshold);
        let x = self.x;
        idx.sort_by(|&a, &b| {
            let (la, lb) = (
                x.get(a, feature) <= threshold,
                x.get(b, feature) <= threshold,
            );
            lb.cmp(&la).then(a.cmp(&b))
        });
        let n_left = idx
            .iter()
            .take_while(|&&i| x.get(i, feature) <= threshold)
            .count();
        let (l, r) = idx.split_at_mut(n_left);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }

    /// Exhaustive search over every feature and every midpoint between
    /// consecutive distinct values. Ties keep the earlier candidate, so the
    /// lowest feature index and then the smallest threshold win.
    fn best_split(&self, idx: &[usize]) -> Option<BestSplit> {
        let min_leaf = self.cfg.min_samples_leaf;
        let n = idx.len();
        let total: f64 = idx.iter().map(|&i| self.y[i]).sum();
        let total_sq: f64 = idx.iter().map(|&i| self.y[i] * self.y[i]).sum();
        let mut best: Option<BestSplit> = None;
        let mut sorted = idx.to_vec();

        for f in 0..self.x.cols() {
            sorted.sort_by(|&a, &b| {
                self.x
                    .get(a, f)
                    .total_cmp(&self.x.get(b, f))
                    .then(a.cmp(&b))
            });
            let (mut sum_l, mut sq_l) = (0.0, 0.0);
            for k in 0..n - 1 {
                let yi = self.y[sorted[k]];
                sum_l += yi;
                sq_l += yi * yi;
                let (lo, hi) = (self.x.get(sorted[k], f), self.x.get(sorted[k + 1], f));
                let n_l = k + 1;
                let n_r = n - n_l;
                if lo == hi || n_l < min_leaf || n_r < min_leaf {
                    continue;
                }
                let (sum_r, sq_r) = (total - sum_l, total_sq - sq_l);
                let sse = (sq_l - sum_l * sum_l / n_l as f64).max(0.0)
                    + (sq_r - sum_r * sum_r / n_r as f64).max(0.0);
                let better = match &best {
                    None => true,
                    Some(b) => sse < b.sse - 1e-12 * b.sse.abs().max(1e-300),
                };
                if better {
                    let mut threshold = 0.5 * (lo + hi);
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(BestSplit {
                        feature: f,
                        threshold,
                        sse,
                    });
                }
            }
        }
        best
    }
}

/// Averaged ensemble of CART trees, each grown on its own bootstrap sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    trees: Vec<Tree>,
    n_features: usize,
    config: ForestConfig,
}

impl Forest {
    /// Tree `t` draws its bootstrap from ChaCha8 stream `t` of `cfg.seed`, so
    /// the forest does not depend on the order trees are built in.
    pub fn fit(features: &Matrix, targets: &[f64], cfg: &ForestConfig) -> Result<Self, ModelError> {
        cfg.validate()?;
        check_training(features, targets)?;
        let n = features.rows();
        if n == 0 {
            return Err(ModelError::TooFewRows {
                rows: 0,
                params: 1,
                needed: 1,
            });
        }
        let trees = (0..cfg.n_trees)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(t as u64);
                let mut sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                let mut grower = Grower {
                    x: features,
                    y: targets,
                    cfg,
                    nodes: Vec::new(),
                };
                grower.grow(&mut sample, 0);
                Tree {
                    nodes: grower.nodes,
                }
            })
            .collect();
        Ok(Self {
            trees,
            n_features: features.cols(),
            config: *cfg,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        if self.trees.is_empty() {
            return Err("forest has no trees".into());
        }
        self.trees
            .iter()
            .try_for_each(|t| t.validate(self.n_features))
    }
}

impl Predict for Forest {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict(&self, x: &[f64]) -> Result<f64, ModelError> {
        check_input(x, self.n_features)?;
        Ok(self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::embedded_table2;
    use crate::metrics::r2;

    #[test]
    fn single_row_forest_is_constant() {
        let x = Matrix::from_rows(&[[1000.0, 10.0, 110.0]]).unwrap();
        let f = Forest::fit(&x, &[3.5], &ForestConfig::default()).unwrap();
        assert_eq!(f.predict(&[2000.0, 30.0, 130.0]).unwrap(), 3.5);
    }

    #[test]
    fn table2_training_fit() {
        let d = embedded_table2();
        let (x, y) = (d.features(), d.targets().unwrap());
        let f = Forest::fit(&x, &y, &ForestConfig::default()).unwrap();
        let p = f.predict_matrix(&x).unwrap();
        assert!(r2(&y, &p).unwrap() >= 0.95);
        assert_eq!(f.trees().len(), 100);
    }

    #[test]
    fn same_seed_same_forest() {
        let d = embedded_table2();
        let (x, y) = (d.features(), d.targets().unwrap());
        let cfg = ForestConfig {
            seed: 42,
            n_trees: 20,
            ..ForestConfig::default()
        };
        assert_eq!(
            Forest::fit(&x, &y, &cfg).unwrap(),
            Forest::fit(&x, &y, &cfg).unwrap()
        );
        let other = ForestConfig { seed: 43, ..cfg };
        assert_ne!(
            Forest::fit(&x, &y, &cfg).unwrap(),
            Forest::fit(&x, &y, &other).unwrap()
        );
    }

    #[test]
    fn leaves_respect_min_samples_and_depth() {
        let d = embedded_table2();
        let (x, y) = (d.features(), d.targets().unwrap());
        let cfg = ForestConfig {
            min_samples_leaf: 3,
            max_depth: Some(2),
            n_trees: 10,
            seed: 1,
        };
        let f = Forest::fit(&x, &y, &cfg).unwrap();
        for t in f.trees() {
            assert!(t.depth() <= 2);
            for n in t.nodes() {
                if let Node::Leaf { samples, .. } = n {
                    assert!(*samples >= 3);
                }
            }
        }
    }

    #[test]
    fn split_prefers_lowest_feature_on_ties() {
        // features 0 and 1 are identical, so every split ties
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]).unwrap();
        let y = [0.0, 0.0, 1.0, 1.0];
        let mut idx = vec![0, 1, 2, 3];
        let cfg = ForestConfig::default();
        let mut g = Grower {
            x: &x,
            y: &y,
            cfg: &cfg,
            nodes: Vec::new(),
        };
        g.grow(&mut idx, 0);
        assert_eq!(
            g.nodes[0],
            Node::Split {
                feature: 0,
                threshold: 1.5,
                left: 1,
                right: 2
            }
        );
    }

    #[test]
    fn invalid_config() {
        let x = Matrix::from_rows(&[[1.0]]).unwrap();
        let cfg = ForestConfig {
            n_trees: 0,
            ..ForestConfig::default()
        };
        assert!(matches!(
            Forest::fit(&x, &[1.0], &cfg),
            Err(ModelError::InvalidConfig(_))
        ));
    }
}
