//! Linear SVM trained by primal stochastic subgradient descent.
//!
//! One-vs-rest over the classes. Each binary problem minimizes
//! (λ/2)‖w‖² + mean hinge loss with step size ηₜ = 1/(λt) and per-epoch
//! shuffling. The weight vector is kept as scale × direction so the
//! per-step shrink (1 − 1/t) costs O(1) instead of O(d); sparse updates
//! touch only a sample's nonzero columns plus the folded bias.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::par;
use crate::rng::{derive_rng, STREAM_SVM};

use super::{argmax, SvmConfig, TrainingSet};

/// One-vs-rest linear model; row c holds class c's weights with the bias
/// in the final slot.
#[derive(Debug, Clone)]
pub struct LinearSvm {
    weights: Vec<Vec<f64>>,
    dim: usize,
}

impl LinearSvm {
    pub(crate) fn from_weights(weights: Vec<Vec<f64>>, dim: usize) -> Result<LinearSvm> {
        if weights.is_empty() || weights.iter().any(|w| w.len() != dim + 1) {
            return Err(Error::ModelFormat("svm weight rows must have length dim+1".into()));
        }
        Ok(LinearSvm { weights, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.weights.len()
    }

    pub(crate) fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    fn score(&self, class: usize, x: &FeatureVector) -> f64 {
        let w = &self.weights[class];
        let mut s = w[self.dim];
        for &(col, v) in x.entries() {
            s += w[col] * v;
        }
        s
    }

    pub(crate) fn predict(&self, x: &FeatureVector) -> Result<usize> {
        let scores: Vec<f64> = (0..self.n_classes()).map(|c| self.score(c, x)).collect();
        Ok(argmax(&scores))
    }
}

pub(crate) fn train(data: &TrainingSet, cfg: &SvmConfig, seed: u64) -> Result<LinearSvm> {
    data.require_two_classes()?;
    if cfg.lambda <= 0.0 || !cfg.lambda.is_finite() {
        return Err(Error::Train(format!("lambda must be positive, got {}", cfg.lambda)));
    }
    if cfg.epochs == 0 {
        return Err(Error::Train("svm epochs must be ≥ 1".into()));
    }
    let n_classes = data.n_classes();
    let weights = par::map_range(n_classes, |class| {
        train_binary(data, class, cfg, seed).0
    });
    Ok(LinearSvm {
        weights,
        dim: data.dim(),
    })
}

/// Train one binary OvR problem. Returns the materialized weights and the
/// objective (λ/2‖w‖² + mean hinge) measured after every epoch.
fn train_binary(
    data: &TrainingSet,
    class: usize,
    cfg: &SvmConfig,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let d = data.dim();
    let n = data.len();
    let mut rng = derive_rng(seed, STREAM_SVM + class as u64);
    let mut order: Vec<usize> = (0..n).collect();

    // w = scale * v, with v[d] the folded bias
    let mut v = vec![0.0f64; d + 1];
    let mut scale = 1.0f64;
    let mut t = 0u64;
    let mut history = Vec::with_capacity(cfg.epochs);

    for _epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (cfg.lambda * t as f64);
            let y = if data.labels()[i] == class { 1.0 } else { -1.0 };
            let x = &data.vectors()[i];

            let mut wx = v[d];
            for &(col, val) in x.entries() {
                wx += v[col] * val;
            }
            let margin = y * scale * wx;

            // shrink: w ← (1 − ηλ) w, and ηλ = 1/t exactly
            let decay = 1.0 - 1.0 / t as f64;
            if decay == 0.0 {
                // first step zeroes w entirely; reset the representation
                v.iter_mut().for_each(|e| *e = 0.0);
                scale = 1.0;
            } else {
                scale *= decay;
            }
            if margin < 1.0 {
                let step = eta * y / scale;
                for &(col, val) in x.entries() {
                    v[col] += step * val;
                }
                v[d] += step;
            }
        }
        history.push(objective(&v, scale, data, class, cfg.lambda));
    }

    let w: Vec<f64> = v.iter().map(|&e| e * scale).collect();
    (w, history)
}

/// λ/2‖w‖² + mean hinge loss over the data, for one binary problem.
fn objective(v: &[f64], scale: f64, data: &TrainingSet, class: usize, lambda: f64) -> f64 {
    let d = data.dim();
    let norm_sq: f64 = v.iter().map(|&e| (e * scale) * (e * scale)).sum();
    let mut hinge = 0.0;
    for (x, &label) in data.vectors().iter().zip(data.labels()) {
        let y = if label == class { 1.0 } else { -1.0 };
        let mut wx = v[d];
        for &(col, val) in x.entries() {
            wx += v[col] * val;
        }
        hinge += (1.0 - y * scale * wx).max(0.0);
    }
    0.5 * lambda * norm_sq + hinge / data.len() as f64
}
