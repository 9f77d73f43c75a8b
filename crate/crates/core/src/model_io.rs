//! Plain-text model persistence and the vocabulary+model prediction bundle.
//!
//! Layout, line-oriented UTF-8:
//!
//! ```text
//! DEVLID 1 <variant>
//! spec <feature-spec string>
//! labels <L>          followed by L label lines
//! ndocs <N>
//! vocab <D>           followed by D rows `<component> <doc_freq> <term>`
//! <variant parameters>
//! ```
//!
//! The term sits last in each vocabulary row because word n-grams contain
//! spaces. Reals are written with 17 significant digits, which round-trips
//! f64 exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::classify::{
    ForestModel, GnbModel, KnnModel, LinearSvm, MlpModel, Model, Tree, TreeNode, Variant,
};
use crate::error::{Error, Result};
use crate::features::{FeatureSpec, FeatureVector, Vocabulary};
use crate::numfmt::sig17;
use crate::script::sanitize;

/// A trained classifier plus everything needed to score raw text.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub vocab: Vocabulary,
    pub labels: Vec<String>,
    pub model: Model,
}

impl TrainedModel {
    pub fn new(vocab: Vocabulary, labels: Vec<String>, model: Model) -> Result<TrainedModel> {
        if vocab.len() != model.dim() {
            return Err(Error::ModelFormat(format!(
                "model dimension {} disagrees with vocabulary size {}",
                model.dim(),
                vocab.len()
            )));
        }
        if labels.len() != model.n_classes() {
            return Err(Error::ModelFormat(format!(
                "model has {} classes but {} labels",
                model.n_classes(),
                labels.len()
            )));
        }
        Ok(TrainedModel {
            vocab,
            labels,
            model,
        })
    }

    /// Sanitize, vectorize, and classify one document. `None` means the
    /// text had no Devanagari content left after sanitization.
    pub fn predict_text(&self, text: &str) -> Result<Option<&str>> {
        let cleaned = sanitize(text);
        let tokens: Vec<String> = cleaned.split_whitespace().map(String::from).collect();
        if tokens.is_empty() {
            return Ok(None);
        }
        let x = self.vocab.vectorize(&tokens)?;
        let idx = self.model.predict(&x)?;
        Ok(Some(&self.labels[idx]))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.serialize()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<TrainedModel> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse(&text)
    }

    fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "DEVLID 1 {}", self.model.variant().name());
        let _ = writeln!(out, "spec {}", self.vocab.spec());
        let _ = writeln!(out, "labels {}", self.labels.len());
        for label in &self.labels {
            out.push_str(label);
            out.push('\n');
        }
        let _ = writeln!(out, "ndocs {}", self.vocab.n_docs());
        let _ = writeln!(out, "vocab {}", self.vocab.len());
        for (atom, term, df) in self.vocab.entries() {
            let _ = writeln!(out, "{atom} {df} {term}");
        }
        match &self.model {
            Model::LinearSvm(m) => write_svm(&mut out, m),
            Model::Knn(m) => write_knn(&mut out, m),
            Model::Forest(m) => write_forest(&mut out, m),
            Model::Gnb(m) => write_gnb(&mut out, m),
            Model::Mlp(m) => write_mlp(&mut out, m),
        }
        out
    }
}

fn join_reals(values: &[f64]) -> String {
    values.iter().map(|&v| sig17(v)).collect::<Vec<_>>().join(" ")
}

fn write_svm(out: &mut String, m: &LinearSvm) {
    let _ = writeln!(out, "weights {} {}", m.n_classes(), m.dim() + 1);
    for row in m.weights() {
        out.push_str(&join_reals(row));
        out.push('\n');
    }
}

fn write_knn(out: &mut String, m: &KnnModel) {
    let (vectors, labels) = m.points();
    let _ = writeln!(out, "k {}", m.k());
    let _ = writeln!(out, "points {}", vectors.len());
    for (x, &label) in vectors.iter().zip(labels) {
        let _ = write!(out, "{label} {}", x.nnz());
        for &(col, v) in x.entries() {
            let _ = write!(out, " {col} {}", sig17(v));
        }
        out.push('\n');
    }
}

fn write_forest(out: &mut String, m: &ForestModel) {
    let _ = writeln!(out, "trees {}", m.n_trees());
    for tree in &m.trees {
        let _ = writeln!(out, "tree {}", tree.nodes.len());
        for node in &tree.nodes {
            match node {
                TreeNode::Split {
                    col,
                    threshold,
                    left,
                    right,
                } => {
                    let _ = writeln!(out, "split {col} {} {left} {right}", sig17(*threshold));
                }
                TreeNode::Leaf { label } => {
                    let _ = writeln!(out, "leaf {label}");
                }
            }
        }
    }
}

fn write_gnb(out: &mut String, m: &GnbModel) {
    let (priors, means, variances, smoothing) = m.parts();
    let _ = writeln!(out, "classes {}", priors.len());
    let _ = writeln!(out, "smoothing {}", sig17(smoothing));
    let _ = writeln!(out, "priors {}", join_reals(priors));
    for mean in means {
        let _ = writeln!(out, "means {}", join_reals(mean));
    }
    for var in variances {
        let _ = writeln!(out, "variances {}", join_reals(var));
    }
}

fn write_mlp(out: &mut String, m: &MlpModel) {
    let (dims, weights, biases, dropout) = m.parts();
    let _ = writeln!(out, "dims {} {} {} {}", dims[0], dims[1], dims[2], dims[3]);
    let _ = writeln!(out, "dropout {}", sig17(dropout));
    for l in 0..3 {
        let _ = writeln!(out, "weights{l} {}", join_reals(&weights[l]));
        let _ = writeln!(out, "biases{l} {}", join_reals(&biases[l]));
    }
}

/// Line cursor that reports positions in parse errors.
struct Reader<'a> {
    lines: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Reader<'a> {
        Reader {
            lines: text.lines(),
            line_no: 0,
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        self.line_no += 1;
        self.lines
            .next()
            .ok_or_else(|| Error::ModelFormat("unexpected end of model file".into()))
    }

    /// Next line must read `<key> <rest>`; returns the rest.
    fn expect(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next_line()?;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest),
            _ => Err(self.bad(&format!("expected `{key} ...`, got `{line}`"))),
        }
    }

    fn bad(&self, what: &str) -> Error {
        Error::ModelFormat(format!("line {}: {}", self.line_no, what))
    }

    fn parse_usize(&self, s: &str) -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| self.bad(&format!("`{s}` is not a count")))
    }

    fn parse_f64(&self, s: &str) -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|_| self.bad(&format!("`{s}` is not a real")))
    }

    fn parse_reals(&self, s: &str, expected: usize) -> Result<Vec<f64>> {
        let values: Vec<f64> = s
            .split_whitespace()
            .map(|tok| self.parse_f64(tok))
            .collect::<Result<_>>()?;
        if values.len() != expected {
            return Err(self.bad(&format!(
                "expected {expected} reals, found {}",
                values.len()
            )));
        }
        Ok(values)
    }
}

fn parse(text: &str) -> Result<TrainedModel> {
    let mut r = Reader::new(text);

    let header = r.next_line()?;
    let mut parts = header.split(' ');
    if parts.next() != Some("DEVLID") {
        return Err(Error::ModelFormat("not a DEVLID model file".into()));
    }
    let version = parts.next().unwrap_or("");
    if version != "1" {
        return Err(Error::ModelFormat(format!(
            "unsupported model format version `{version}`"
        )));
    }
    let variant_name = parts
        .next()
        .ok_or_else(|| Error::ModelFormat("missing variant in header".into()))?;
    let variant = Variant::from_str(variant_name)
        .map_err(|_| Error::ModelFormat(format!("unknown variant `{variant_name}`")))?;

    let spec: FeatureSpec = r
        .expect("spec")?
        .parse()
        .map_err(|e| Error::ModelFormat(format!("bad feature spec: {e}")))?;

    let n_labels = {
        let s = r.expect("labels")?;
        r.parse_usize(s)?
    };
    let mut labels = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        labels.push(r.next_line()?.to_string());
    }
    if labels.is_empty() {
        return Err(Error::ModelFormat("model has no labels".into()));
    }

    let n_docs = {
        let s = r.expect("ndocs")?;
        r.parse_usize(s)?
    };
    let dim = {
        let s = r.expect("vocab")?;
        r.parse_usize(s)?
    };
    let mut terms = Vec::with_capacity(dim);
    let mut doc_freq = Vec::with_capacity(dim);
    for _ in 0..dim {
        let line = r.next_line()?;
        let mut fields = line.splitn(3, ' ');
        let atom = r.parse_usize(fields.next().unwrap_or(""))?;
        let df = r.parse_usize(fields.next().unwrap_or(""))?;
        let term = fields
            .next()
            .ok_or_else(|| r.bad("vocabulary row is missing its term"))?;
        terms.push((atom, term.to_string()));
        doc_freq.push(df);
    }
    let vocab = Vocabulary::from_parts(spec, terms, doc_freq, n_docs)?;

    let n_classes = labels.len();
    let model = match variant {
        Variant::Svm => parse_svm(&mut r, dim, n_classes)?,
        Variant::Knn => parse_knn(&mut r, dim, n_classes)?,
        Variant::Forest => parse_forest(&mut r, dim, n_classes)?,
        Variant::Gnb => parse_gnb(&mut r, dim, n_classes)?,
        Variant::Mlp => parse_mlp(&mut r, dim, n_classes)?,
    };
    TrainedModel::new(vocab, labels, model)
}

fn parse_svm(r: &mut Reader, dim: usize, n_classes: usize) -> Result<Model> {
    let header = r.expect("weights")?;
    let shape: Vec<usize> = header
        .split_whitespace()
        .map(|s| r.parse_usize(s))
        .collect::<Result<_>>()?;
    if shape != [n_classes, dim + 1] {
        return Err(r.bad("svm weight shape disagrees with header"));
    }
    let mut rows = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let line = r.next_line()?;
        rows.push(r.parse_reals(line, dim + 1)?);
    }
    Ok(Model::LinearSvm(LinearSvm::from_weights(rows, dim)?))
}

fn parse_knn(r: &mut Reader, dim: usize, n_classes: usize) -> Result<Model> {
    let k = {
        let s = r.expect("k")?;
        r.parse_usize(s)?
    };
    let n = {
        let s = r.expect("points")?;
        r.parse_usize(s)?
    };
    let mut vectors = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let line = r.next_line()?;
        let mut tok = line.split_whitespace();
        let label = r.parse_usize(tok.next().unwrap_or(""))?;
        if label >= n_classes {
            return Err(r.bad("point label out of range"));
        }
        let nnz = r.parse_usize(tok.next().unwrap_or(""))?;
        let mut entries = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            let col = r.parse_usize(tok.next().unwrap_or(""))?;
            let val = r.parse_f64(tok.next().unwrap_or(""))?;
            entries.push((col, val));
        }
        if tok.next().is_some() {
            return Err(r.bad("trailing fields after point entries"));
        }
        let x = FeatureVector::from_entries(dim, entries)
            .map_err(|e| r.bad(&format!("bad point: {e}")))?;
        vectors.push(x);
        labels.push(label);
    }
    Ok(Model::Knn(KnnModel::from_parts(k, vectors, labels, n_classes)?))
}

fn parse_forest(r: &mut Reader, dim: usize, n_classes: usize) -> Result<Model> {
    let n_trees = {
        let s = r.expect("trees")?;
        r.parse_usize(s)?
    };
    let mut trees = Vec::with_capacity(n_trees);
    for _ in 0..n_trees {
        let n_nodes = {
            let s = r.expect("tree")?;
            r.parse_usize(s)?
        };
        if n_nodes == 0 {
            return Err(r.bad("empty tree"));
        }
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let line = r.next_line()?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let node = match fields.as_slice() {
                ["split", col, threshold, left, right] => {
                    let (col, left, right) = (
                        r.parse_usize(col)?,
                        r.parse_usize(left)?,
                        r.parse_usize(right)?,
                    );
                    if col >= dim || left >= n_nodes || right >= n_nodes {
                        return Err(r.bad("split indices out of range"));
                    }
                    TreeNode::Split {
                        col,
                        threshold: r.parse_f64(threshold)?,
                        left,
                        right,
                    }
                }
                ["leaf", label] => {
                    let label = r.parse_usize(label)?;
                    if label >= n_classes {
                        return Err(r.bad("leaf label out of range"));
                    }
                    TreeNode::Leaf { label }
                }
                _ => return Err(r.bad(&format!("unrecognized tree node `{line}`"))),
            };
            nodes.push(node);
        }
        trees.push(Tree { nodes });
    }
    Ok(Model::Forest(ForestModel::from_parts(trees, dim, n_classes)))
}

fn parse_gnb(r: &mut Reader, dim: usize, n_classes: usize) -> Result<Model> {
    let c = {
        let s = r.expect("classes")?;
        r.parse_usize(s)?
    };
    if c != n_classes {
        return Err(r.bad("class count disagrees with label list"));
    }
    let smoothing = {
        let s = r.expect("smoothing")?;
        r.parse_f64(s)?
    };
    let priors = {
        let s = r.expect("priors")?;
        r.parse_reals(s, n_classes)?
    };
    let mut means = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let s = r.expect("means")?;
        means.push(r.parse_reals(s, dim)?);
    }
    let mut variances = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let s = r.expect("variances")?;
        variances.push(r.parse_reals(s, dim)?);
    }
    Ok(Model::Gnb(GnbModel::from_parts(
        priors, means, variances, smoothing,
    )?))
}

fn parse_mlp(r: &mut Reader, dim: usize, n_classes: usize) -> Result<Model> {
    let dims: Vec<usize> = {
        let s = r.expect("dims")?;
        s.split_whitespace()
            .map(|tok| r.parse_usize(tok))
            .collect::<Result<_>>()?
    };
    if dims.len() != 4 || dims[0] != dim || dims[3] != n_classes {
        return Err(r.bad("mlp dims disagree with header"));
    }
    let dims = [dims[0], dims[1], dims[2], dims[3]];
    let dropout = {
        let s = r.expect("dropout")?;
        r.parse_f64(s)?
    };
    let mut weights: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut biases: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for l in 0..3 {
        let w = r.expect(&format!("weights{l}"))?;
        weights[l] = r.parse_reals(w, dims[l] * dims[l + 1])?;
        let b = r.expect(&format!("biases{l}"))?;
        biases[l] = r.parse_reals(b, dims[l + 1])?;
    }
    Ok(Model::Mlp(MlpModel::from_parts(
        dims, weights, biases, dropout,
    )?))
}
