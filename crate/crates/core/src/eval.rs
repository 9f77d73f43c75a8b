//! Stratified splitting, confusion matrices, and per-class metrics.

use rand::seq::SliceRandom;

use crate::classify::{Model, TrainConfig, TrainingSet, Variant};
use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};
use crate::features::{fit_vocabulary, FeatureSpec};
use crate::model_io::TrainedModel;
use crate::numfmt::fixed_half_up;
use crate::par;
use crate::rng::{derive_rng, STREAM_SPLIT};

/// Counts of actual (rows) versus predicted (columns) classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn from_indices(
        golds: &[usize],
        preds: &[usize],
        labels: Vec<String>,
    ) -> Result<ConfusionMatrix> {
        if golds.len() != preds.len() {
            return Err(Error::InvalidArgument(format!(
                "{} gold labels but {} predictions",
                golds.len(),
                preds.len()
            )));
        }
        let n = labels.len();
        let mut counts = vec![vec![0usize; n]; n];
        for (&g, &p) in golds.iter().zip(preds) {
            if g >= n || p >= n {
                return Err(Error::InvalidArgument("label index out of range".into()));
            }
            counts[g][p] += 1;
        }
        Ok(ConfusionMatrix { labels, counts })
    }

    /// Build from pre-filled counts; rows are actual classes.
    pub fn from_counts(labels: Vec<String>, counts: Vec<Vec<usize>>) -> Result<ConfusionMatrix> {
        let n = labels.len();
        if counts.len() != n || counts.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument(
                "confusion counts must be square in the label count".into(),
            ));
        }
        Ok(ConfusionMatrix { labels, counts })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for label in &self.labels {
            out.push('\t');
            out.push_str(label);
        }
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.counts) {
            out.push_str(label);
            for &c in row {
                out.push_str(&format!("\t{c}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Tally string-labeled gold/prediction pairs against a canonical label list.
pub fn confusion<S: AsRef<str>, T: AsRef<str>>(
    golds: &[S],
    preds: &[T],
    labels: &[String],
) -> Result<ConfusionMatrix> {
    let index_of = |name: &str| -> Result<usize> {
        labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown label `{name}`")))
    };
    let golds = golds
        .iter()
        .map(|s| index_of(s.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let preds = preds
        .iter()
        .map(|s| index_of(s.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    ConfusionMatrix::from_indices(&golds, &preds, labels.to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub labels: Vec<String>,
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
}

/// Per-class precision/recall/F1 plus unweighted macro means and accuracy.
/// Zero denominators yield 0 rather than an error.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidArgument(
            "confusion matrix has no observations".into(),
        ));
    }
    let n = cm.labels.len();
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };

    let mut per_class = Vec::with_capacity(n);
    for c in 0..n {
        let tp = cm.counts[c][c];
        let col: usize = (0..n).map(|r| cm.counts[r][c]).sum();
        let row: usize = cm.counts[c].iter().sum();
        // single division keeps F1 exact on ratios like 62/80
        per_class.push(ClassMetrics {
            precision: ratio(tp, col),
            recall: ratio(tp, row),
            f1: ratio(2 * tp, 2 * tp + (col - tp) + (row - tp)),
        });
    }
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / n as f64;
    let (macro_precision, macro_recall, macro_f1) =
        (mean(|m| m.precision), mean(|m| m.recall), mean(|m| m.f1));
    Ok(MetricsReport {
        labels: cm.labels.clone(),
        per_class,
        macro_precision,
        macro_recall,
        macro_f1,
        accuracy: cm.trace() as f64 / total as f64,
    })
}

impl MetricsReport {
    /// Rows at 2 decimals (half-up), accuracy trailer at 4.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("class\tprecision\trecall\tf1\n");
        for (label, m) in self.labels.iter().zip(&self.per_class) {
            out.push_str(&format!(
                "{label}\t{}\t{}\t{}\n",
                fixed_half_up(m.precision, 2),
                fixed_half_up(m.recall, 2),
                fixed_half_up(m.f1, 2),
            ));
        }
        out.push_str(&format!(
            "MACRO\t{}\t{}\t{}\n",
            fixed_half_up(self.macro_precision, 2),
            fixed_half_up(self.macro_recall, 2),
            fixed_half_up(self.macro_f1, 2),
        ));
        out.push_str(&format!("accuracy={}\n", fixed_half_up(self.accuracy, 4)));
        out
    }
}

/// Stratified split: per label, shuffle and send max(1, ⌊count×fraction⌋)
/// documents to test. Each label keeps at least one document on each side.
pub fn split(
    corpus: &LabeledCorpus,
    test_fraction: f64,
    seed: u64,
) -> Result<(LabeledCorpus, LabeledCorpus)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let by_label = corpus.indices_by_label();
    for (li, indices) in by_label.iter().enumerate() {
        if indices.len() < 2 {
            return Err(Error::Corpus(format!(
                "label `{}` has {} document(s); need at least 2 to split",
                corpus.labels()[li],
                indices.len()
            )));
        }
    }
    let mut train_docs = Vec::new();
    let mut test_docs = Vec::new();
    for (li, indices) in by_label.iter().enumerate() {
        let mut order = indices.clone();
        let mut rng = derive_rng(seed, STREAM_SPLIT + li as u64);
        order.shuffle(&mut rng);
        let n_test = ((indices.len() as f64 * test_fraction).floor() as usize).max(1);
        for (pos, &doc_idx) in order.iter().enumerate() {
            let doc = corpus.documents()[doc_idx].clone();
            if pos < n_test {
                test_docs.push(doc);
            } else {
                train_docs.push(doc);
            }
        }
    }
    Ok((
        LabeledCorpus::from_documents(train_docs)?,
        LabeledCorpus::from_documents(test_docs)?,
    ))
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub trained: TrainedModel,
    pub confusion: ConfusionMatrix,
    pub report: MetricsReport,
    pub train_size: usize,
    pub test_size: usize,
}

/// Full pipeline: split, fit the vocabulary on train only, vectorize,
/// train, score the held-out documents.
pub fn run_experiment(
    corpus: &LabeledCorpus,
    spec: &FeatureSpec,
    variant: Variant,
    cfg: &TrainConfig,
    test_fraction: f64,
) -> Result<ExperimentResult> {
    let (train_c, test_c) = split(corpus, test_fraction, cfg.seed)?;
    let vocab = fit_vocabulary(&train_c, spec)?;

    let vectorize = |c: &LabeledCorpus| -> Result<Vec<_>> {
        par::map_collect(c.documents(), |d| vocab.vectorize(&d.tokens))
            .into_iter()
            .collect()
    };
    let label_indices = |c: &LabeledCorpus| -> Vec<usize> {
        c.documents()
            .iter()
            .map(|d| {
                corpus
                    .label_index(&d.language)
                    .expect("split documents keep corpus labels")
            })
            .collect()
    };

    let train_vectors = vectorize(&train_c)?;
    let data = TrainingSet::new(train_vectors, label_indices(&train_c), corpus.labels().to_vec())?;
    let model = Model::train(variant, &data, cfg)?;

    let test_vectors = vectorize(&test_c)?;
    let preds = model.predict_batch(&test_vectors)?;
    let confusion =
        ConfusionMatrix::from_indices(&label_indices(&test_c), &preds, corpus.labels().to_vec())?;
    let report = metrics(&confusion)?;
    Ok(ExperimentResult {
        trained: TrainedModel::new(vocab, corpus.labels().to_vec(), model)?,
        confusion,
        report,
        train_size: train_c.len(),
        test_size: test_c.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tallies_pairs_into_rows_by_actual_class() {
        let cm = confusion(&["a", "a", "b"], &["a", "b", "b"], &labels(&["a", "b"])).unwrap();
        assert_eq!(cm.counts(), &[vec![1, 1], vec![0, 1]]);
        assert_eq!(cm.total(), 3);
        assert_eq!(cm.trace(), 2);
    }

    #[test]
    fn all_correct_is_diagonal() {
        let golds = ["x", "y", "x", "z"];
        let cm = confusion(&golds, &golds, &labels(&["x", "y", "z"])).unwrap();
        assert_eq!(cm.trace(), cm.total());
        assert_eq!(cm.counts()[0][0], 2);
        assert_eq!(metrics(&cm).unwrap().accuracy, 1.0);
    }

    #[test]
    fn empty_lists_make_a_zero_matrix_and_metrics_reject_it() {
        let cm = confusion::<&str, &str>(&[], &[], &labels(&["a", "b"])).unwrap();
        assert_eq!(cm.total(), 0);
        assert!(metrics(&cm).is_err());
    }

    #[test]
    fn unknown_label_and_length_mismatch_are_errors() {
        assert!(confusion(&["a"], &["q"], &labels(&["a", "b"])).is_err());
        assert!(confusion(&["a", "b"], &["a"], &labels(&["a", "b"])).is_err());
    }

    #[test]
    fn perfect_two_class_matrix_scores_ones() {
        let cm = ConfusionMatrix::from_counts(labels(&["a", "b"]), vec![vec![1, 0], vec![0, 1]])
            .unwrap();
        let report = metrics(&cm).unwrap();
        for m in &report.per_class {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn zero_denominators_yield_zero_not_errors() {
        // class b never occurs and is never predicted
        let cm = ConfusionMatrix::from_counts(labels(&["a", "b"]), vec![vec![2, 0], vec![0, 0]])
            .unwrap();
        let report = metrics(&cm).unwrap();
        assert_eq!(report.per_class[1].precision, 0.0);
        assert_eq!(report.per_class[1].recall, 0.0);
        assert_eq!(report.per_class[1].f1, 0.0);
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn report_rows_round_half_up() {
        // p = 1/2, r = 1/3, f1 = 2/5
        let cm = ConfusionMatrix::from_counts(
            labels(&["a", "b"]),
            vec![vec![1, 2], vec![1, 0]],
        )
        .unwrap();
        let tsv = metrics(&cm).unwrap().to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], "class\tprecision\trecall\tf1");
        assert_eq!(lines[1], "a\t0.50\t0.33\t0.40");
        assert!(lines[4].starts_with("accuracy=0.2500"));
    }

    #[test]
    fn permuting_label_order_permutes_metrics_consistently() {
        let golds = ["a", "a", "b", "c", "c", "c", "b"];
        let preds = ["a", "b", "b", "c", "a", "c", "b"];
        let one = metrics(&confusion(&golds, &preds, &labels(&["a", "b", "c"])).unwrap()).unwrap();
        let two = metrics(&confusion(&golds, &preds, &labels(&["c", "a", "b"])).unwrap()).unwrap();
        assert_eq!(one.accuracy, two.accuracy);
        for (i, label) in one.labels.iter().enumerate() {
            let j = two.labels.iter().position(|l| l == label).unwrap();
            assert_eq!(one.per_class[i], two.per_class[j]);
        }
        assert_eq!(one.macro_f1, two.macro_f1);
    }

    fn synthetic(per_label: &[(&str, usize)]) -> LabeledCorpus {
        let mut docs = Vec::new();
        for &(lang, n) in per_label {
            for i in 0..n {
                let text = format!("कखग{} घङच", "छज".repeat(i % 3 + 1));
                docs.push(Document::from_raw(format!("d{i:03}"), lang, &text).unwrap());
            }
        }
        LabeledCorpus::from_documents(docs).unwrap()
    }

    #[test]
    fn split_is_stratified_with_floor_and_minimum_one() {
        let corpus = synthetic(&[("p", 10), ("q", 5), ("r", 2)]);
        let (train, test) = split(&corpus, 0.25, 7).unwrap();
        assert_eq!(train.len() + test.len(), corpus.len());
        let count = |c: &LabeledCorpus, lang: &str| {
            c.documents().iter().filter(|d| d.language == lang).count()
        };
        // 10×0.25 → 2, 5×0.25 → 1, 2×0.25 → max(1, 0) = 1
        assert_eq!(count(&test, "p"), 2);
        assert_eq!(count(&test, "q"), 1);
        assert_eq!(count(&test, "r"), 1);
        assert_eq!(count(&train, "r"), 1);
    }

    #[test]
    fn split_partitions_without_overlap() {
        let corpus = synthetic(&[("p", 9), ("q", 6)]);
        let (train, test) = split(&corpus, 0.4, 3).unwrap();
        let key = |d: &Document| (d.language.clone(), d.id.clone());
        let mut seen: Vec<_> = train
            .documents()
            .iter()
            .chain(test.documents())
            .map(key)
            .collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), corpus.len());
    }

    #[test]
    fn split_is_deterministic_in_the_seed() {
        let corpus = synthetic(&[("p", 8), ("q", 8)]);
        let ids = |c: &LabeledCorpus| -> Vec<String> {
            c.documents().iter().map(|d| d.id.clone()).collect()
        };
        let (tr1, te1) = split(&corpus, 0.25, 11).unwrap();
        let (tr2, te2) = split(&corpus, 0.25, 11).unwrap();
        assert_eq!(ids(&tr1), ids(&tr2));
        assert_eq!(ids(&te1), ids(&te2));
    }

    #[test]
    fn split_rejects_bad_fraction_and_tiny_labels() {
        let corpus = synthetic(&[("p", 4), ("q", 4)]);
        assert!(split(&corpus, 0.0, 0).is_err());
        assert!(split(&corpus, 1.0, 0).is_err());
        let single = synthetic(&[("p", 4), ("q", 1)]);
        assert!(split(&single, 0.25, 0).is_err());
    }

    #[test]
    fn separable_languages_evaluate_perfectly() {
        let corpus = crate::synth::separable_corpus(4, 12, 20, 5).unwrap();
        let spec: FeatureSpec = "c2".parse().unwrap();
        let mut cfg = TrainConfig {
            seed: 5,
            ..TrainConfig::default()
        };
        // the 50-epoch default leaves the Pegasos last iterate noisy on a
        // 36-document train split; 500 epochs reaches a stable optimum
        cfg.svm.epochs = 500;
        let result = run_experiment(&corpus, &spec, Variant::Svm, &cfg, 0.25).unwrap();
        assert_eq!(result.report.accuracy, 1.0);
        assert_eq!(result.train_size + result.test_size, corpus.len());
        assert_eq!(result.test_size, 12);
        assert_eq!(result.confusion.trace(), 12);
    }

    #[test]
    fn same_seed_reproduces_the_report() {
        let corpus = crate::synth::separable_corpus(3, 8, 15, 2).unwrap();
        let spec: FeatureSpec = "c1,c2:tfidf".parse().unwrap();
        let mut cfg = TrainConfig {
            seed: 21,
            ..TrainConfig::default()
        };
        cfg.forest.n_trees = 10;
        let a = run_experiment(&corpus, &spec, Variant::Forest, &cfg, 0.3).unwrap();
        let b = run_experiment(&corpus, &spec, Variant::Forest, &cfg, 0.3).unwrap();
        assert_eq!(a.report, b.report);
        assert_eq!(a.confusion, b.confusion);
    }

    #[test]
    fn vocabulary_is_fitted_on_train_only() {
        let corpus = crate::synth::separable_corpus(3, 6, 10, 8).unwrap();
        let spec: FeatureSpec = "c2".parse().unwrap();
        let cfg = TrainConfig {
            seed: 8,
            ..TrainConfig::default()
        };
        let result = run_experiment(&corpus, &spec, Variant::Knn, &cfg, 0.25).unwrap();
        let (train_c, _) = split(&corpus, 0.25, 8).unwrap();
        let mut train_grams = std::collections::HashSet::new();
        for doc in train_c.documents() {
            for token in &doc.tokens {
                let chars: Vec<char> = token.chars().collect();
                for w in chars.windows(2) {
                    train_grams.insert(w.iter().collect::<String>());
                }
            }
        }
        for (_, term, _) in result.trained.vocab.entries() {
            assert!(train_grams.contains(term), "leaked term `{term}`");
        }
    }
}
