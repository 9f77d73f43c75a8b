//! k-nearest-neighbor classifier over Euclidean distance.

use crate::error::{Error, Result};
use crate::features::FeatureVector;

use super::{KnnConfig, TrainingSet};

/// Stores the training set verbatim; all work happens at prediction.
#[derive(Debug, Clone)]
pub struct KnnModel {
    k: usize,
    vectors: Vec<FeatureVector>,
    labels: Vec<usize>,
    n_classes: usize,
}

impl KnnModel {
    pub(crate) fn from_parts(
        k: usize,
        vectors: Vec<FeatureVector>,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<KnnModel> {
        if k == 0 || vectors.len() < k || vectors.len() != labels.len() {
            return Err(Error::ModelFormat("inconsistent knn point store".into()));
        }
        Ok(KnnModel {
            k,
            vectors,
            labels,
            n_classes,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub(crate) fn points(&self) -> (&[FeatureVector], &[usize]) {
        (&self.vectors, &self.labels)
    }

    /// Majority vote among the k nearest stored points. Equal distances
    /// rank by lower stored index; an inter-label vote tie returns the
    /// single nearest neighbor's label, whatever it is.
    pub(crate) fn predict(&self, x: &FeatureVector) -> Result<usize> {
        // squared distance orders identically to the true distance
        let mut order: Vec<(f64, usize)> = self
            .vectors
            .iter()
            .enumerate()
            .map(|(i, v)| Ok((v.squared_distance(x)?, i)))
            .collect::<Result<_>>()?;
        order.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("distances are finite")
                .then(a.1.cmp(&b.1))
        });
        let neighbors = &order[..self.k];

        let mut votes = vec![0usize; self.n_classes];
        for &(_, i) in neighbors {
            votes[self.labels[i]] += 1;
        }
        let top = *votes.iter().max().expect("n_classes ≥ 1");
        let tied = votes.iter().filter(|&&v| v == top).count();
        if tied > 1 {
            return Ok(self.labels[neighbors[0].1]);
        }
        Ok(votes.iter().position(|&v| v == top).expect("top vote exists"))
    }
}

pub(crate) fn train(data: &TrainingSet, cfg: &KnnConfig) -> Result<KnnModel> {
    if cfg.k == 0 {
        return Err(Error::Train("k must be ≥ 1".into()));
    }
    if data.len() < cfg.k {
        return Err(Error::Train(format!(
            "k={} but only {} training points",
            cfg.k,
            data.len()
        )));
    }
    Ok(KnnModel {
        k: cfg.k,
        vectors: data.vectors().to_vec(),
        labels: data.labels().to_vec(),
        n_classes: data.n_classes(),
    })
}
