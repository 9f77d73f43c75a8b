//! Random forest: bagged CART trees with Gini splits.
//!
//! Each tree trains on a bootstrap sample of size n. At every node,
//! ⌈√d⌉ candidate columns are drawn without replacement; candidate
//! thresholds are midpoints between consecutive distinct sorted values.
//! The (column, threshold) pair with the largest impurity decrease wins;
//! on equal decrease the first candidate examined wins, which is fixed
//! by the seeded draw order, so forests are reproducible bit for bit.

use rand::Rng;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::par;
use crate::rng::{derive_rng, STREAM_FOREST};

use super::{argmax, ForestConfig, TrainingSet};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TreeNode {
    Split {
        col: usize,
        threshold: f64,
        /// Child node indices into the tree's node array.
        left: usize,
        right: usize,
    },
    Leaf {
        label: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tree {
    pub(crate) nodes: Vec<TreeNode>,
}

impl Tree {
    fn predict(&self, x: &FeatureVector) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { label } => return *label,
                TreeNode::Split {
                    col,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x.get(*col) <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ForestModel {
    pub(crate) trees: Vec<Tree>,
    dim: usize,
    n_classes: usize,
}

impl ForestModel {
    pub(crate) fn from_parts(trees: Vec<Tree>, dim: usize, n_classes: usize) -> ForestModel {
        ForestModel {
            trees,
            dim,
            n_classes,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub(crate) fn predict(&self, x: &FeatureVector) -> Result<usize> {
        let mut votes = vec![0.0f64; self.n_classes];
        for tree in &self.trees {
            votes[tree.predict(x)] += 1.0;
        }
        Ok(argmax(&votes))
    }
}

pub(crate) fn train(data: &TrainingSet, cfg: &ForestConfig, seed: u64) -> Result<ForestModel> {
    data.require_two_classes()?;
    if cfg.n_trees == 0 {
        return Err(Error::Train("forest needs at least one tree".into()));
    }
    if cfg.min_leaf == 0 {
        return Err(Error::Train("min_leaf must be ≥ 1".into()));
    }
    let rows = data.dense_rows();
    let trees = par::map_range(cfg.n_trees, |t| {
        grow_tree(data, &rows, cfg, derive_rng(seed, STREAM_FOREST + t as u64))
    });
    Ok(ForestModel {
        trees,
        dim: data.dim(),
        n_classes: data.n_classes(),
    })
}

fn grow_tree(
    data: &TrainingSet,
    rows: &[Vec<f64>],
    cfg: &ForestConfig,
    mut rng: impl Rng,
) -> Tree {
    let n = data.len();
    let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut builder = TreeBuilder {
        rows,
        labels: data.labels(),
        n_classes: data.n_classes(),
        n_candidates: (data.dim() as f64).sqrt().ceil() as usize,
        cfg,
        nodes: Vec::new(),
    };
    builder.build(sample, 0, &mut rng);
    Tree {
        nodes: builder.nodes,
    }
}

struct TreeBuilder<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [usize],
    n_classes: usize,
    n_candidates: usize,
    cfg: &'a ForestConfig,
    nodes: Vec<TreeNode>,
}

impl TreeBuilder<'_> {
    /// Append the subtree for `samples`; returns its root index.
    fn build(&mut self, samples: Vec<usize>, depth: usize, rng: &mut impl Rng) -> usize {
        let counts = self.class_counts(&samples);
        let majority = argmax(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>());

        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.cfg.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_capped || samples.len() < self.cfg.min_leaf || samples.len() < 2 {
            let at = self.nodes.len();
            self.nodes.push(TreeNode::Leaf { label: majority });
            return at;
        }

        match self.best_split(&samples, rng) {
            None => {
                let at = self.nodes.len();
                self.nodes.push(TreeNode::Leaf { label: majority });
                at
            }
            Some((col, threshold)) => {
                let (left_s, right_s): (Vec<usize>, Vec<usize>) = samples
                    .into_iter()
                    .partition(|&i| self.rows[i][col] <= threshold);
                let at = self.nodes.len();
                self.nodes.push(TreeNode::Leaf { label: majority }); // placeholder
                let left = self.build(left_s, depth + 1, rng);
                let right = self.build(right_s, depth + 1, rng);
                self.nodes[at] = TreeNode::Split {
                    col,
                    threshold,
                    left,
                    right,
                };
                at
            }
        }
    }

    fn class_counts(&self, samples: &[usize]) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_classes];
        for &i in samples {
            counts[self.labels[i]] += 1;
        }
        counts
    }

    /// Pick the best (column, threshold) among ⌈√d⌉ sampled columns, by
    /// Gini impurity decrease; None when no candidate improves on the
    /// parent.
    fn best_split(&self, samples: &[usize], rng: &mut impl Rng) -> Option<(usize, f64)> {
        let d = self.rows[0].len();
        let cols = rand::seq::index::sample(rng, d, self.n_candidates.min(d));
        let parent_counts = self.class_counts(samples);
        let parent_gini = gini(&parent_counts, samples.len());

        let mut best: Option<(usize, f64)> = None;
        let mut best_decrease = 0.0f64;
        let n = samples.len() as f64;

        for col in cols {
            let mut values: Vec<(f64, usize)> = samples
                .iter()
                .map(|&i| (self.rows[i][col], self.labels[i]))
                .collect();
            values.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("training data is finite"));

            let mut left_counts = vec![0u64; self.n_classes];
            let mut right_counts = parent_counts.clone();
            for split_at in 1..values.len() {
                let (prev_val, prev_label) = values[split_at - 1];
                left_counts[prev_label] += 1;
                right_counts[prev_label] -= 1;
                let cur_val = values[split_at].0;
                if cur_val == prev_val {
                    continue;
                }
                let threshold = prev_val + (cur_val - prev_val) / 2.0;
                let nl = split_at as f64;
                let nr = n - nl;
                let weighted = (nl / n) * gini(&left_counts, split_at)
                    + (nr / n) * gini(&right_counts, values.len() - split_at);
                let decrease = parent_gini - weighted;
                if decrease > best_decrease {
                    best_decrease = decrease;
                    best = Some((col, threshold));
                }
            }
        }
        best
    }
}

/// Gini impurity 1 − Σ pᵢ².
fn gini(counts: &[u64], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p
        })
        .sum::<f64>()
}
