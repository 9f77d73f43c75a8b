//! Five from-scratch classifiers behind one train/predict contract.
//!
//! All of them consume a [`TrainingSet`] of sparse vectors with integer
//! class labels and produce a [`Model`]. Ties in any argmax (class
//! scores, votes, likelihoods) always resolve to the lowest label index,
//! so predictions are deterministic by construction.

mod forest;
mod gnb;
mod knn;
mod mlp;
mod svm;

pub use forest::ForestModel;
pub(crate) use forest::{Tree, TreeNode};
pub use gnb::GnbModel;
pub use knn::KnnModel;
pub use mlp::MlpModel;
pub use svm::LinearSvm;

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::par;

/// Labeled vectors ready for training.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    vectors: Vec<FeatureVector>,
    labels: Vec<usize>,
    label_names: Vec<String>,
    dim: usize,
}

impl TrainingSet {
    pub fn new(
        vectors: Vec<FeatureVector>,
        labels: Vec<usize>,
        label_names: Vec<String>,
    ) -> Result<TrainingSet> {
        if vectors.len() != labels.len() {
            return Err(Error::Train(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if vectors.len() < 2 {
            return Err(Error::Train("need at least 2 training samples".into()));
        }
        let dim = vectors[0].dim();
        for v in &vectors {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
            if v.entries().iter().any(|&(_, x)| !x.is_finite()) {
                return Err(Error::Train("non-finite value in training vector".into()));
            }
        }
        for &l in &labels {
            if l >= label_names.len() {
                return Err(Error::Train(format!(
                    "label index {l} out of range for {} classes",
                    label_names.len()
                )));
            }
        }
        Ok(TrainingSet {
            vectors,
            labels,
            label_names,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn vectors(&self) -> &[FeatureVector] {
        &self.vectors
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    /// Number of distinct labels actually present.
    fn distinct_labels(&self) -> usize {
        let mut seen = vec![false; self.label_names.len()];
        for &l in &self.labels {
            seen[l] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }

    fn require_two_classes(&self) -> Result<()> {
        if self.distinct_labels() < 2 {
            return Err(Error::Train("training data contains a single class".into()));
        }
        Ok(())
    }

    fn dense_rows(&self) -> Vec<Vec<f64>> {
        par::map_collect(&self.vectors, |v| v.to_dense())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnConfig {
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// None = grow until pure.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnbConfig {
    /// Variance floor as a fraction of the largest global feature variance.
    pub var_smoothing_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub hidden: [usize; 2],
    pub learning_rate: f64,
    pub dropout_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

/// Every knob for every variant, plus the seed all of them draw from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub seed: u64,
    pub svm: SvmConfig,
    pub knn: KnnConfig,
    pub forest: ForestConfig,
    pub nb: GnbConfig,
    pub mlp: MlpConfig,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            seed: 0,
            svm: SvmConfig {
                lambda: 1e-4,
                epochs: 50,
            },
            knn: KnnConfig { k: 3 },
            forest: ForestConfig {
                n_trees: 100,
                max_depth: None,
                min_leaf: 1,
            },
            nb: GnbConfig {
                var_smoothing_factor: 1e-9,
            },
            mlp: MlpConfig {
                hidden: [256, 64],
                learning_rate: 0.05,
                dropout_rate: 0.5,
                batch_size: 256,
                epochs: 200,
            },
        }
    }
}

/// Names for the five classifier variants, stable across the CLI and the
/// model file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Svm,
    Knn,
    Forest,
    Gnb,
    Mlp,
}

pub const ALL_VARIANTS: [Variant; 5] = [
    Variant::Svm,
    Variant::Knn,
    Variant::Forest,
    Variant::Gnb,
    Variant::Mlp,
];

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Svm => "svm",
            Variant::Knn => "knn",
            Variant::Forest => "forest",
            Variant::Gnb => "gnb",
            Variant::Mlp => "mlp",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "svm" => Ok(Variant::Svm),
            "knn" => Ok(Variant::Knn),
            "forest" => Ok(Variant::Forest),
            "gnb" => Ok(Variant::Gnb),
            "mlp" => Ok(Variant::Mlp),
            other => Err(Error::InvalidArgument(format!(
                "unknown classifier `{other}` (expected svm|knn|forest|gnb|mlp)"
            ))),
        }
    }
}

/// A trained classifier of any variant.
#[derive(Debug, Clone)]
pub enum Model {
    LinearSvm(LinearSvm),
    Knn(KnnModel),
    Forest(ForestModel),
    Gnb(GnbModel),
    Mlp(MlpModel),
}

impl Model {
    pub fn train(variant: Variant, data: &TrainingSet, cfg: &TrainConfig) -> Result<Model> {
        match variant {
            Variant::Svm => svm::train(data, &cfg.svm, cfg.seed).map(Model::LinearSvm),
            Variant::Knn => knn::train(data, &cfg.knn).map(Model::Knn),
            Variant::Forest => forest::train(data, &cfg.forest, cfg.seed).map(Model::Forest),
            Variant::Gnb => gnb::train(data, &cfg.nb).map(Model::Gnb),
            Variant::Mlp => mlp::train(data, &cfg.mlp, cfg.seed).map(Model::Mlp),
        }
    }

    pub fn variant(&self) -> Variant {
        match self {
            Model::LinearSvm(_) => Variant::Svm,
            Model::Knn(_) => Variant::Knn,
            Model::Forest(_) => Variant::Forest,
            Model::Gnb(_) => Variant::Gnb,
            Model::Mlp(_) => Variant::Mlp,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::LinearSvm(m) => m.dim(),
            Model::Knn(m) => m.dim(),
            Model::Forest(m) => m.dim(),
            Model::Gnb(m) => m.dim(),
            Model::Mlp(m) => m.dim(),
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Model::LinearSvm(m) => m.n_classes(),
            Model::Knn(m) => m.n_classes(),
            Model::Forest(m) => m.n_classes(),
            Model::Gnb(m) => m.n_classes(),
            Model::Mlp(m) => m.n_classes(),
        }
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<usize> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        match self {
            Model::LinearSvm(m) => m.predict(x),
            Model::Knn(m) => m.predict(x),
            Model::Forest(m) => m.predict(x),
            Model::Gnb(m) => m.predict(x),
            Model::Mlp(m) => m.predict(x),
        }
    }

    pub fn predict_batch(&self, xs: &[FeatureVector]) -> Result<Vec<usize>> {
        for x in xs {
            if x.dim() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    got: x.dim(),
                });
            }
        }
        par::map_collect(xs, |x| self.predict(x)).into_iter().collect()
    }
}

/// Index of the largest score; earlier indices win exact ties.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Two well-separated clusters in 2-D, `per_class` points each.
    pub fn two_blobs(per_class: usize) -> TrainingSet {
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for i in 0..per_class {
            let off = (i as f64) * 0.01;
            vectors.push(FeatureVector::from_dense(&[-1.0 - off, -1.0 + off]).unwrap());
            labels.push(0);
            vectors.push(FeatureVector::from_dense(&[1.0 + off, 1.0 - off]).unwrap());
            labels.push(1);
        }
        TrainingSet::new(vectors, labels, vec!["a".into(), "b".into()]).unwrap()
    }

    pub fn point(values: &[f64]) -> FeatureVector {
        FeatureVector::from_dense(values).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use testutil::*;

    #[test]
    fn training_set_validation() {
        let names = vec!["a".to_string(), "b".to_string()];
        let v = vec![point(&[1.0, 0.0]), point(&[0.0, 1.0])];
        assert!(TrainingSet::new(v.clone(), vec![0, 1], names.clone()).is_ok());
        assert!(TrainingSet::new(v.clone(), vec![0], names.clone()).is_err());
        assert!(TrainingSet::new(v.clone(), vec![0, 2], names.clone()).is_err());
        let mixed = vec![point(&[1.0]), point(&[0.0, 1.0])];
        assert!(TrainingSet::new(mixed, vec![0, 1], names.clone()).is_err());
        let nan = vec![point(&[1.0, 0.0]), FeatureVector::from_dense(&[f64::NAN, 1.0]).unwrap()];
        assert!(TrainingSet::new(nan, vec![0, 1], names).is_err());
    }

    #[test]
    fn argmax_prefers_lowest_index_on_ties() {
        assert_eq!(argmax(&[1.0, 1.0, 1.0]), 0);
        assert_eq!(argmax(&[0.0, 2.0, 2.0]), 1);
        assert_eq!(argmax(&[0.0, 1.0, 2.0]), 2);
        assert_eq!(argmax(&[3.0]), 0);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in ALL_VARIANTS {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("cnn".parse::<Variant>().is_err());
    }

    #[test]
    fn batch_matches_single_for_every_variant() {
        let data = two_blobs(10);
        let cfg = TrainConfig {
            mlp: MlpConfig {
                hidden: [6, 4],
                epochs: 40,
                dropout_rate: 0.1,
                ..TrainConfig::default().mlp
            },
            ..TrainConfig::default()
        };
        let tests: Vec<FeatureVector> = (0..10)
            .map(|i| point(&[(i as f64) / 5.0 - 1.0, (i as f64) / 7.0 - 0.5]))
            .collect();
        for variant in ALL_VARIANTS {
            let model = Model::train(variant, &data, &cfg).unwrap();
            let batch = model.predict_batch(&tests).unwrap();
            let single: Vec<usize> = tests.iter().map(|x| model.predict(x).unwrap()).collect();
            assert_eq!(batch, single, "{}", variant.name());
            assert!(batch.iter().all(|&l| l < 2));
        }
        let model = Model::train(Variant::Svm, &data, &cfg).unwrap();
        assert!(model.predict_batch(&[]).unwrap().is_empty());
        assert!(model.predict(&point(&[1.0])).is_err());
    }

    #[test]
    fn single_class_data_is_rejected_where_required() {
        let v = vec![point(&[1.0, 0.0]), point(&[0.5, 0.0])];
        let data = TrainingSet::new(v, vec![0, 0], vec!["a".into(), "b".into()]).unwrap();
        let cfg = TrainConfig::default();
        for variant in [Variant::Svm, Variant::Forest, Variant::Gnb, Variant::Mlp] {
            assert!(Model::train(variant, &data, &cfg).is_err(), "{}", variant.name());
        }
    }
}
