//! 2-hidden-layer perceptron: sigmoid hiddens, softmax output, mini-batch SGD.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::par;
use crate::rng::{derive_rng, STREAM_MLP};

use super::{argmax, MlpConfig, TrainingSet};

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    /// [d, h1, h2, C]
    dims: [usize; 4],
    /// Row-major fan_out×fan_in, input side first.
    weights: [Vec<f64>; 3],
    biases: [Vec<f64>; 3],
    dropout_rate: f64,
}

/// Per-layer gradient accumulator shaped like the model.
struct GradBuf {
    weights: [Vec<f64>; 3],
    biases: [Vec<f64>; 3],
}

impl GradBuf {
    fn zeros(model: &MlpModel) -> GradBuf {
        GradBuf {
            weights: std::array::from_fn(|l| vec![0.0; model.weights[l].len()]),
            biases: std::array::from_fn(|l| vec![0.0; model.biases[l].len()]),
        }
    }
}

/// Activations one forward pass produced, kept for backprop.
struct Cache {
    /// sigmoid outputs, pre-dropout
    raw: [Vec<f64>; 2],
    /// what the next layer actually consumed (post-dropout)
    fed: [Vec<f64>; 2],
    /// dropout multipliers, 0 or 1/keep; empty when dropout was off
    masks: [Vec<f64>; 2],
    probs: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn affine(weights: &[f64], biases: &[f64], input: &[f64]) -> Vec<f64> {
    let fan_in = input.len();
    biases
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            let row = &weights[j * fan_in..(j + 1) * fan_in];
            b + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>()
        })
        .collect()
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / total).collect()
}

impl MlpModel {
    fn init(dims: [usize; 4], dropout_rate: f64, rng: &mut ChaCha8Rng) -> MlpModel {
        let weights = std::array::from_fn(|l| {
            let (fan_in, fan_out) = (dims[l], dims[l + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            (0..fan_in * fan_out)
                .map(|_| rng.random_range(-bound..=bound))
                .collect()
        });
        MlpModel {
            dims,
            weights,
            biases: std::array::from_fn(|l| vec![0.0; dims[l + 1]]),
            dropout_rate,
        }
    }

    pub(crate) fn from_parts(
        dims: [usize; 4],
        weights: [Vec<f64>; 3],
        biases: [Vec<f64>; 3],
        dropout_rate: f64,
    ) -> Result<MlpModel> {
        for l in 0..3 {
            if weights[l].len() != dims[l] * dims[l + 1] || biases[l].len() != dims[l + 1] {
                return Err(Error::ModelFormat("mlp parameter shapes disagree".into()));
            }
        }
        if dims.contains(&0) {
            return Err(Error::ModelFormat("mlp layer sizes must be positive".into()));
        }
        if !(0.0..1.0).contains(&dropout_rate) {
            return Err(Error::ModelFormat("mlp dropout rate out of range".into()));
        }
        Ok(MlpModel {
            dims,
            weights,
            biases,
            dropout_rate,
        })
    }

    pub fn dim(&self) -> usize {
        self.dims[0]
    }

    pub fn n_classes(&self) -> usize {
        self.dims[3]
    }

    #[allow(clippy::type_complexity)]
    pub(crate) fn parts(&self) -> (&[usize; 4], &[Vec<f64>; 3], &[Vec<f64>; 3], f64) {
        (&self.dims, &self.weights, &self.biases, self.dropout_rate)
    }

    /// Total number of scalar parameters, in flat order W0 b0 W1 b1 W2 b2.
    pub fn param_count(&self) -> usize {
        (0..3).map(|l| self.weights[l].len() + self.biases[l].len()).sum()
    }

    pub fn param(&self, mut idx: usize) -> f64 {
        for l in 0..3 {
            if idx < self.weights[l].len() {
                return self.weights[l][idx];
            }
            idx -= self.weights[l].len();
            if idx < self.biases[l].len() {
                return self.biases[l][idx];
            }
            idx -= self.biases[l].len();
        }
        panic!("parameter index out of range")
    }

    pub fn set_param(&mut self, mut idx: usize, value: f64) {
        for l in 0..3 {
            if idx < self.weights[l].len() {
                self.weights[l][idx] = value;
                return;
            }
            idx -= self.weights[l].len();
            if idx < self.biases[l].len() {
                self.biases[l][idx] = value;
                return;
            }
            idx -= self.biases[l].len();
        }
        panic!("parameter index out of range")
    }

    /// `mask_rng` present = training pass: hidden units are dropped with
    /// probability dropout_rate and survivors scaled by 1/keep.
    fn forward(&self, x: &FeatureVector, mut mask_rng: Option<&mut ChaCha8Rng>) -> Cache {
        let keep = 1.0 - self.dropout_rate;
        let mut raw: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        let mut fed: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        let mut masks: [Vec<f64>; 2] = [Vec::new(), Vec::new()];

        // input layer consumes the sparse vector directly
        let fan_in = self.dims[0];
        let mut z = self.biases[0].clone();
        for (j, zj) in z.iter_mut().enumerate() {
            let row = &self.weights[0][j * fan_in..(j + 1) * fan_in];
            for &(col, v) in x.entries() {
                *zj += row[col] * v;
            }
        }

        for layer in 0..2 {
            let a: Vec<f64> = z.iter().map(|&z| sigmoid(z)).collect();
            let dropped = match mask_rng.as_deref_mut() {
                Some(rng) if self.dropout_rate > 0.0 => {
                    let mask: Vec<f64> = a
                        .iter()
                        .map(|_| {
                            if rng.random::<f64>() < self.dropout_rate {
                                0.0
                            } else {
                                1.0 / keep
                            }
                        })
                        .collect();
                    let dropped: Vec<f64> =
                        a.iter().zip(&mask).map(|(&ai, &m)| ai * m).collect();
                    masks[layer] = mask;
                    dropped
                }
                _ => a.clone(),
            };
            z = affine(&self.weights[layer + 1], &self.biases[layer + 1], &dropped);
            raw[layer] = a;
            fed[layer] = dropped;
        }

        Cache {
            raw,
            fed,
            masks,
            probs: softmax(&z),
        }
    }

    /// Class probabilities with dropout off.
    pub fn forward_probs(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        if x.dim() != self.dims[0] {
            return Err(Error::DimensionMismatch {
                expected: self.dims[0],
                got: x.dim(),
            });
        }
        Ok(self.forward(x, None).probs)
    }

    pub(crate) fn predict(&self, x: &FeatureVector) -> Result<usize> {
        Ok(argmax(&self.forward_probs(x)?))
    }

    /// Accumulates this sample's gradient into `grad` and returns its
    /// cross-entropy loss. `cache` must come from a forward pass of `x`.
    fn backward(&self, x: &FeatureVector, y: usize, cache: &Cache, grad: &mut GradBuf) -> f64 {
        let loss = -cache.probs[y].ln();

        // output layer: dL/dz = p − onehot(y)
        let mut delta: Vec<f64> = cache.probs.clone();
        delta[y] -= 1.0;

        for layer in (1..3).rev() {
            let input = &cache.fed[layer - 1];
            let fan_in = input.len();
            for (j, &dj) in delta.iter().enumerate() {
                let row = &mut grad.weights[layer][j * fan_in..(j + 1) * fan_in];
                for (gi, &xi) in row.iter_mut().zip(input) {
                    *gi += dj * xi;
                }
                grad.biases[layer][j] += dj;
            }
            // push delta through the weights, the dropout mask, then σ'
            let mut prev = vec![0.0; fan_in];
            for (j, &dj) in delta.iter().enumerate() {
                let row = &self.weights[layer][j * fan_in..(j + 1) * fan_in];
                for (p, &w) in prev.iter_mut().zip(row) {
                    *p += dj * w;
                }
            }
            let a = &cache.raw[layer - 1];
            for (i, p) in prev.iter_mut().enumerate() {
                if let Some(&m) = cache.masks[layer - 1].get(i) {
                    *p *= m;
                }
                *p *= a[i] * (1.0 - a[i]);
            }
            delta = prev;
        }

        let fan_in = self.dims[0];
        for (j, &dj) in delta.iter().enumerate() {
            let row = &mut grad.weights[0][j * fan_in..(j + 1) * fan_in];
            for &(col, v) in x.entries() {
                row[col] += dj * v;
            }
            grad.biases[0][j] += dj;
        }
        loss
    }

    /// Mean cross-entropy over the batch, dropout off.
    pub fn loss(&self, xs: &[FeatureVector], labels: &[usize]) -> Result<f64> {
        self.check_batch(xs, labels)?;
        let losses = par::map_range(xs.len(), |i| {
            let cache = self.forward(&xs[i], None);
            -cache.probs[labels[i]].ln()
        });
        Ok(losses.iter().sum::<f64>() / xs.len() as f64)
    }

    /// Flat mean gradient (order W0 b0 W1 b1 W2 b2), dropout off.
    pub fn gradient(&self, xs: &[FeatureVector], labels: &[usize]) -> Result<Vec<f64>> {
        self.check_batch(xs, labels)?;
        let mut grad = GradBuf::zeros(self);
        for (x, &y) in xs.iter().zip(labels) {
            let cache = self.forward(x, None);
            self.backward(x, y, &cache, &mut grad);
        }
        Ok(self.flatten(&grad, 1.0 / xs.len() as f64))
    }

    fn check_batch(&self, xs: &[FeatureVector], labels: &[usize]) -> Result<()> {
        if xs.is_empty() || xs.len() != labels.len() {
            return Err(Error::InvalidArgument(
                "batch needs equally many vectors and labels".into(),
            ));
        }
        for x in xs {
            if x.dim() != self.dims[0] {
                return Err(Error::DimensionMismatch {
                    expected: self.dims[0],
                    got: x.dim(),
                });
            }
        }
        if labels.iter().any(|&y| y >= self.dims[3]) {
            return Err(Error::InvalidArgument("label out of range".into()));
        }
        Ok(())
    }

    fn flatten(&self, grad: &GradBuf, scale: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in 0..3 {
            out.extend(grad.weights[l].iter().map(|g| g * scale));
            out.extend(grad.biases[l].iter().map(|g| g * scale));
        }
        out
    }

    fn apply_step(&mut self, grad: &GradBuf, step: f64) {
        for l in 0..3 {
            for (w, g) in self.weights[l].iter_mut().zip(&grad.weights[l]) {
                *w -= step * g;
            }
            for (b, g) in self.biases[l].iter_mut().zip(&grad.biases[l]) {
                *b -= step * g;
            }
        }
    }
}

pub(crate) fn train(data: &TrainingSet, cfg: &MlpConfig, seed: u64) -> Result<MlpModel> {
    data.require_two_classes()?;
    if cfg.hidden.contains(&0) {
        return Err(Error::Train("hidden layer sizes must be positive".into()));
    }
    if !(cfg.learning_rate > 0.0 && cfg.learning_rate.is_finite()) {
        return Err(Error::Train("learning_rate must be positive".into()));
    }
    if !(0.0..1.0).contains(&cfg.dropout_rate) {
        return Err(Error::Train("dropout_rate must be in [0, 1)".into()));
    }
    if cfg.batch_size == 0 || cfg.epochs == 0 {
        return Err(Error::Train("batch_size and epochs must be positive".into()));
    }

    let dims = [data.dim(), cfg.hidden[0], cfg.hidden[1], data.n_classes()];
    // one stream covers init, the per-epoch shuffles, and the dropout
    // masks, consumed strictly in that order
    let mut rng = derive_rng(seed, STREAM_MLP);
    let mut model = MlpModel::init(dims, cfg.dropout_rate, &mut rng);

    let mut indices: Vec<usize> = (0..data.len()).collect();
    for epoch in 0..cfg.epochs {
        indices.shuffle(&mut rng);
        for (batch, chunk) in indices.chunks(cfg.batch_size).enumerate() {
            let mut grad = GradBuf::zeros(&model);
            let mut loss = 0.0;
            for &i in chunk {
                let x = &data.vectors()[i];
                let cache = model.forward(x, Some(&mut rng));
                loss += model.backward(x, data.labels()[i], &cache, &mut grad);
            }
            let scale = 1.0 / chunk.len() as f64;
            if !(loss * scale).is_finite() {
                return Err(Error::Train(format!(
                    "non-finite loss at epoch {}, batch {}",
                    epoch + 1,
                    batch + 1
                )));
            }
            model.apply_step(&grad, cfg.learning_rate * scale);
        }
    }
    Ok(model)
}
