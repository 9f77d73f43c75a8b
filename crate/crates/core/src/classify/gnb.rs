//! Gaussian Naive Bayes with variance smoothing.

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::par;

use super::{argmax, GnbConfig, TrainingSet};

#[derive(Debug, Clone)]
pub struct GnbModel {
    priors: Vec<f64>,
    /// C×d
    means: Vec<Vec<f64>>,
    /// C×d, every entry ≥ smoothing
    variances: Vec<Vec<f64>>,
    smoothing: f64,
}

impl GnbModel {
    pub(crate) fn from_parts(
        priors: Vec<f64>,
        means: Vec<Vec<f64>>,
        variances: Vec<Vec<f64>>,
        smoothing: f64,
    ) -> Result<GnbModel> {
        if means.len() != priors.len() || variances.len() != priors.len() {
            return Err(Error::ModelFormat("gnb parameter shapes disagree".into()));
        }
        if smoothing <= 0.0 {
            return Err(Error::ModelFormat("gnb smoothing must be positive".into()));
        }
        Ok(GnbModel {
            priors,
            means,
            variances,
            smoothing,
        })
    }

    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    pub fn n_classes(&self) -> usize {
        self.priors.len()
    }

    #[allow(clippy::type_complexity)]
    pub(crate) fn parts(&self) -> (&[f64], &[Vec<f64>], &[Vec<f64>], f64) {
        (&self.priors, &self.means, &self.variances, self.smoothing)
    }

    /// log prior + Σ log N(xᵢ; μ, σ²), maximized over classes.
    pub(crate) fn predict(&self, x: &FeatureVector) -> Result<usize> {
        let dense = x.to_dense();
        let scores: Vec<f64> = (0..self.n_classes())
            .map(|c| {
                if self.priors[c] == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let mut score = self.priors[c].ln();
                for (i, &xi) in dense.iter().enumerate() {
                    let var = self.variances[c][i];
                    let diff = xi - self.means[c][i];
                    score += -0.5 * (2.0 * std::f64::consts::PI * var).ln()
                        - diff * diff / (2.0 * var);
                }
                score
            })
            .collect();
        Ok(argmax(&scores))
    }
}

pub(crate) fn train(data: &TrainingSet, cfg: &GnbConfig) -> Result<GnbModel> {
    data.require_two_classes()?;
    if cfg.var_smoothing_factor <= 0.0 || !cfg.var_smoothing_factor.is_finite() {
        return Err(Error::Train("var_smoothing_factor must be positive".into()));
    }
    let n = data.len();
    let d = data.dim();
    let n_classes = data.n_classes();

    let mut class_counts = vec![0usize; n_classes];
    for &l in data.labels() {
        class_counts[l] += 1;
    }
    if let Some(c) = class_counts.iter().position(|&c| c < 2) {
        return Err(Error::Train(format!(
            "class `{}` has {} sample(s); need at least 2",
            data.label_names()[c],
            class_counts[c]
        )));
    }

    let rows = data.dense_rows();

    // global per-feature variance fixes the smoothing floor
    let global_mean: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let global_var: Vec<f64> = (0..d)
        .map(|j| {
            rows.iter()
                .map(|r| {
                    let diff = r[j] - global_mean[j];
                    diff * diff
                })
                .sum::<f64>()
                / n as f64
        })
        .collect();
    let max_var = global_var.iter().cloned().fold(0.0f64, f64::max);
    // all-constant features leave max_var at 0; fall back to the bare
    // factor so variances stay strictly positive
    let smoothing = if max_var > 0.0 {
        cfg.var_smoothing_factor * max_var
    } else {
        cfg.var_smoothing_factor
    };

    let per_class = par::map_range(n_classes, |c| {
        let members: Vec<&Vec<f64>> = rows
            .iter()
            .zip(data.labels())
            .filter(|&(_, &l)| l == c)
            .map(|(r, _)| r)
            .collect();
        let m = members.len() as f64;
        let mut mean = vec![0.0; d];
        let mut var = vec![0.0; d];
        for j in 0..d {
            mean[j] = members.iter().map(|r| r[j]).sum::<f64>() / m;
            var[j] = members
                .iter()
                .map(|r| {
                    let diff = r[j] - mean[j];
                    diff * diff
                })
                .sum::<f64>()
                / m;
            var[j] = var[j].max(smoothing);
        }
        (mean, var)
    });

    let mut means = Vec::with_capacity(n_classes);
    let mut variances = Vec::with_capacity(n_classes);
    for (mean, var) in per_class {
        means.push(mean);
        variances.push(var);
    }
    let priors: Vec<f64> = class_counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(GnbModel {
        priors,
        means,
        variances,
        smoothing,
    })
}
