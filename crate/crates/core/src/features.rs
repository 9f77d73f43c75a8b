//! Feature extraction: n-grams, phoneme profiles, vocabularies, vectors.
//!
//! A [`FeatureSpec`] names one or more feature *atoms* (character n-grams,
//! word n-grams, phoneme profiles) plus a weighting scheme. Fitting a
//! [`Vocabulary`] on a training corpus assigns every surviving term a
//! column; [`Vocabulary::vectorize`] then turns any token list into a
//! sparse [`FeatureVector`]. Columns are blocked per atom, so the same
//! string occurring as a character unigram and as a word unigram maps to
//! two distinct columns.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};
use crate::par;
use crate::script::{classify_char, CharClass};

/// Which character classes a phoneme profile counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    /// Independent vowels and consonants.
    Phonemes,
    IndependentVowels,
    Consonants,
    /// Matras together with combining signs.
    Matras,
    /// All four retained classes.
    PhonemesPlusMatras,
}

impl ProfileKind {
    fn accepts(self, class: CharClass) -> bool {
        use CharClass::*;
        match self {
            ProfileKind::Phonemes => matches!(class, IndependentVowel | Consonant),
            ProfileKind::IndependentVowels => matches!(class, IndependentVowel),
            ProfileKind::Consonants => matches!(class, Consonant),
            ProfileKind::Matras => matches!(class, Matra | Sign),
            ProfileKind::PhonemesPlusMatras => {
                matches!(class, IndependentVowel | Consonant | Matra | Sign)
            }
        }
    }

    fn token(self) -> &'static str {
        match self {
            ProfileKind::Phonemes => "ph",
            ProfileKind::IndependentVowels => "vow",
            ProfileKind::Consonants => "con",
            ProfileKind::Matras => "mat",
            ProfileKind::PhonemesPlusMatras => "phmat",
        }
    }
}

/// One feature family inside a spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureAtom {
    /// Contiguous code-point windows of length n within a token, 1..=5.
    CharNgram(u8),
    /// Contiguous windows of n tokens joined by a space, 1..=5.
    WordNgram(u8),
    PhonemeProfile(ProfileKind),
}

impl fmt::Display for FeatureAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureAtom::CharNgram(n) => write!(f, "c{n}"),
            FeatureAtom::WordNgram(n) => write!(f, "w{n}"),
            FeatureAtom::PhonemeProfile(kind) => f.write_str(kind.token()),
        }
    }
}

/// How raw term counts become vector values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    Counts,
    /// Counts divided by the document's total in-vocabulary count.
    RelativeFrequency,
    /// Smoothed tf-idf followed by L2 normalization.
    TfIdf,
}

impl Weighting {
    fn token(self) -> &'static str {
        match self {
            Weighting::Counts => "count",
            Weighting::RelativeFrequency => "freq",
            Weighting::TfIdf => "tfidf",
        }
    }
}

pub const DEFAULT_MAX_FEATURES: usize = 20_000;

/// A feature configuration: which atoms, how weighted, how pruned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpec {
    pub components: Vec<FeatureAtom>,
    pub weighting: Weighting,
    /// Keep at most this many terms, by corpus frequency.
    pub max_features: Option<usize>,
    /// Drop terms seen in fewer than this many fitting documents.
    pub min_doc_freq: usize,
}

impl FeatureSpec {
    pub fn new(components: Vec<FeatureAtom>, weighting: Weighting) -> Result<FeatureSpec> {
        let spec = FeatureSpec {
            components,
            weighting,
            max_features: Some(DEFAULT_MAX_FEATURES),
            min_doc_freq: 1,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidArgument("feature spec has no components".into()));
        }
        for (i, atom) in self.components.iter().enumerate() {
            if let FeatureAtom::CharNgram(n) | FeatureAtom::WordNgram(n) = atom {
                if !(1..=5).contains(n) {
                    return Err(Error::InvalidArgument(format!(
                        "n-gram order must be 1..=5, got {n}"
                    )));
                }
            }
            if self.components[..i].contains(atom) {
                return Err(Error::InvalidArgument(format!("duplicate feature atom `{atom}`")));
            }
        }
        if self.min_doc_freq == 0 {
            return Err(Error::InvalidArgument("min_doc_freq must be ≥ 1".into()));
        }
        Ok(())
    }
}

impl fmt::Display for FeatureSpec {
    /// Compact form, e.g. `c3,w3:freq`. Always carries the weighting suffix.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{atom}")?;
        }
        write!(f, ":{}", self.weighting.token())
    }
}

impl FromStr for FeatureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<FeatureSpec> {
        let bad = |msg: &str| Error::InvalidArgument(format!("feature spec `{s}`: {msg}"));
        let (atoms_part, weighting) = match s.rsplit_once(':') {
            Some((a, w)) => {
                let weighting = match w {
                    "count" => Weighting::Counts,
                    "freq" => Weighting::RelativeFrequency,
                    "tfidf" => Weighting::TfIdf,
                    other => return Err(bad(&format!("unknown weighting `{other}`"))),
                };
                (a, weighting)
            }
            None => (s, Weighting::RelativeFrequency),
        };
        let mut components = Vec::new();
        for tok in atoms_part.split(',') {
            let atom = match tok {
                "ph" => FeatureAtom::PhonemeProfile(ProfileKind::Phonemes),
                "vow" => FeatureAtom::PhonemeProfile(ProfileKind::IndependentVowels),
                "con" => FeatureAtom::PhonemeProfile(ProfileKind::Consonants),
                "mat" => FeatureAtom::PhonemeProfile(ProfileKind::Matras),
                "phmat" => FeatureAtom::PhonemeProfile(ProfileKind::PhonemesPlusMatras),
                _ => {
                    let (kind, order) = tok.split_at(1.min(tok.len()));
                    let n: u8 = order
                        .parse()
                        .map_err(|_| bad(&format!("unknown atom `{tok}`")))?;
                    match kind {
                        "c" => FeatureAtom::CharNgram(n),
                        "w" => FeatureAtom::WordNgram(n),
                        _ => return Err(bad(&format!("unknown atom `{tok}`"))),
                    }
                }
            };
            components.push(atom);
        }
        let spec = FeatureSpec {
            components,
            weighting,
            max_features: Some(DEFAULT_MAX_FEATURES),
            min_doc_freq: 1,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Character n-grams per token; windows never cross token boundaries and
/// no padding is used. Tokens shorter than n contribute nothing.
pub fn char_ngrams(tokens: &[String], n: usize) -> Result<Vec<String>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n-gram order 0".into()));
    }
    let mut out = Vec::new();
    for token in tokens {
        let chars: Vec<char> = token.chars().collect();
        if chars.len() < n {
            continue;
        }
        for window in chars.windows(n) {
            out.push(window.iter().collect());
        }
    }
    Ok(out)
}

/// Word n-grams: windows of n tokens joined by a single space.
pub fn word_ngrams(tokens: &[String], n: usize) -> Result<Vec<String>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n-gram order 0".into()));
    }
    if tokens.len() < n {
        return Ok(Vec::new());
    }
    Ok(tokens.windows(n).map(|w| w.join(" ")).collect())
}

/// One single-character string per character whose class the kind accepts.
pub fn phoneme_profile(tokens: &[String], kind: ProfileKind) -> Vec<String> {
    let mut out = Vec::new();
    for token in tokens {
        for c in token.chars() {
            if kind.accepts(classify_char(c)) {
                out.push(c.to_string());
            }
        }
    }
    out
}

fn extract_atom(tokens: &[String], atom: FeatureAtom) -> Result<Vec<String>> {
    match atom {
        FeatureAtom::CharNgram(n) => char_ngrams(tokens, n as usize),
        FeatureAtom::WordNgram(n) => word_ngrams(tokens, n as usize),
        FeatureAtom::PhonemeProfile(kind) => Ok(phoneme_profile(tokens, kind)),
    }
}

/// A fitted term table mapping (atom, term) pairs to vector columns.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    spec: FeatureSpec,
    /// (component index, term) in column order.
    terms: Vec<(usize, String)>,
    /// Per component: term → column.
    index: Vec<HashMap<String, usize>>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

/// Count term occurrences per atom for one document.
fn count_terms(tokens: &[String], spec: &FeatureSpec) -> Result<Vec<HashMap<String, u64>>> {
    let mut per_atom = Vec::with_capacity(spec.components.len());
    for &atom in &spec.components {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for term in extract_atom(tokens, atom)? {
            *counts.entry(term).or_insert(0) += 1;
        }
        per_atom.push(counts);
    }
    Ok(per_atom)
}

/// Fit a vocabulary on a training corpus.
///
/// Terms below `min_doc_freq` are dropped. If `max_features` is set, the
/// survivors are ranked by total corpus frequency; ties go to the
/// lexicographically smaller term, then the earlier component. Final
/// column order is component order, then term order; it does not depend
/// on corpus iteration order, hence reproducible.
pub fn fit_vocabulary(corpus: &LabeledCorpus, spec: &FeatureSpec) -> Result<Vocabulary> {
    spec.validate()?;
    let per_doc: Vec<Result<Vec<HashMap<String, u64>>>> =
        par::map_collect(corpus.documents(), |doc| count_terms(&doc.tokens, spec));

    // merge: (atom, term) -> (total count, doc freq); merge order does not
    // matter because both stats are commutative sums
    let mut merged: Vec<HashMap<String, (u64, usize)>> =
        vec![HashMap::new(); spec.components.len()];
    for doc_counts in per_doc {
        for (atom_idx, counts) in doc_counts?.into_iter().enumerate() {
            for (term, c) in counts {
                let slot = merged[atom_idx].entry(term).or_insert((0, 0));
                slot.0 += c;
                slot.1 += 1;
            }
        }
    }

    let mut candidates: Vec<(usize, String, u64, usize)> = Vec::new();
    for (atom_idx, terms) in merged.into_iter().enumerate() {
        for (term, (count, df)) in terms {
            if df >= spec.min_doc_freq {
                candidates.push((atom_idx, term, count, df));
            }
        }
    }
    if let Some(cap) = spec.max_features {
        if candidates.len() > cap {
            candidates.sort_by(|a, b| {
                b.2.cmp(&a.2)
                    .then_with(|| a.1.cmp(&b.1))
                    .then_with(|| a.0.cmp(&b.0))
            });
            candidates.truncate(cap);
        }
    }
    if candidates.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let mut terms = Vec::with_capacity(candidates.len());
    let mut doc_freq = Vec::with_capacity(candidates.len());
    let mut index = vec![HashMap::new(); spec.components.len()];
    for (col, (atom_idx, term, _count, df)) in candidates.into_iter().enumerate() {
        index[atom_idx].insert(term.clone(), col);
        terms.push((atom_idx, term));
        doc_freq.push(df);
    }
    Ok(Vocabulary {
        spec: spec.clone(),
        terms,
        index,
        doc_freq,
        n_docs: corpus.len(),
    })
}

impl Vocabulary {
    /// Number of columns.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn spec(&self) -> &FeatureSpec {
        &self.spec
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    /// Column-ordered (component index, term, doc_freq) rows.
    pub fn entries(&self) -> impl Iterator<Item = (usize, &str, usize)> + '_ {
        self.terms
            .iter()
            .zip(&self.doc_freq)
            .map(|((atom, term), df)| (*atom, term.as_str(), *df))
    }

    /// Smoothed inverse document frequency for a column.
    fn idf(&self, col: usize) -> f64 {
        ((1.0 + self.n_docs as f64) / (1.0 + self.doc_freq[col] as f64)).ln() + 1.0
    }

    /// Vectorize a token list under this vocabulary's spec and weighting.
    /// Out-of-vocabulary terms are ignored.
    pub fn vectorize(&self, tokens: &[String]) -> Result<FeatureVector> {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for (atom_idx, &atom) in self.spec.components.iter().enumerate() {
            for term in extract_atom(tokens, atom)? {
                if let Some(&col) = self.index[atom_idx].get(&term) {
                    *counts.entry(col).or_insert(0.0) += 1.0;
                }
            }
        }
        let mut entries: Vec<(usize, f64)> = counts.into_iter().collect();
        entries.sort_by_key(|&(col, _)| col);

        match self.spec.weighting {
            Weighting::Counts => {}
            Weighting::RelativeFrequency => {
                let total: f64 = entries.iter().map(|&(_, v)| v).sum();
                if total > 0.0 {
                    for entry in &mut entries {
                        entry.1 /= total;
                    }
                }
            }
            Weighting::TfIdf => {
                for entry in &mut entries {
                    entry.1 *= self.idf(entry.0);
                }
                let norm = entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for entry in &mut entries {
                        entry.1 /= norm;
                    }
                }
            }
        }
        FeatureVector::from_entries(self.len(), entries)
    }

    /// Rebuild a vocabulary from persisted parts (model file loading).
    pub(crate) fn from_parts(
        spec: FeatureSpec,
        terms: Vec<(usize, String)>,
        doc_freq: Vec<usize>,
        n_docs: usize,
    ) -> Result<Vocabulary> {
        if terms.len() != doc_freq.len() {
            return Err(Error::ModelFormat(
                "vocabulary terms and doc_freq lengths differ".into(),
            ));
        }
        let mut index = vec![HashMap::new(); spec.components.len()];
        for (col, (atom_idx, term)) in terms.iter().enumerate() {
            if *atom_idx >= spec.components.len() {
                return Err(Error::ModelFormat(format!(
                    "vocabulary row {col}: component {atom_idx} out of range"
                )));
            }
            if index[*atom_idx].insert(term.clone(), col).is_some() {
                return Err(Error::ModelFormat(format!("duplicate vocabulary term `{term}`")));
            }
        }
        Ok(Vocabulary {
            spec,
            terms,
            index,
            doc_freq,
            n_docs,
        })
    }
}

/// Sparse nonnegative vector with fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    dim: usize,
    /// (column, value), strictly increasing columns, no zeros stored.
    entries: Vec<(usize, f64)>,
}

impl FeatureVector {
    /// Build from (column, value) pairs. Zero values are dropped; columns
    /// must be unique and < dim.
    pub fn from_entries(dim: usize, mut entries: Vec<(usize, f64)>) -> Result<FeatureVector> {
        entries.retain(|&(_, v)| v != 0.0);
        entries.sort_by_key(|&(col, _)| col);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidArgument(format!(
                    "duplicate column {} in feature vector",
                    pair[0].0
                )));
            }
        }
        if let Some(&(col, _)) = entries.last() {
            if col >= dim {
                return Err(Error::InvalidArgument(format!(
                    "column {col} out of range for dimension {dim}"
                )));
            }
        }
        Ok(FeatureVector { dim, entries })
    }

    pub fn zeros(dim: usize) -> FeatureVector {
        FeatureVector { dim, entries: Vec::new() }
    }

    pub fn from_dense(values: &[f64]) -> Result<FeatureVector> {
        FeatureVector::from_entries(
            values.len(),
            values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, &v)| (i, v))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, col: usize) -> f64 {
        match self.entries.binary_search_by_key(&col, |&(c, _)| c) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(col, v) in &self.entries {
            out[col] = v;
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &FeatureVector) -> Result<f64> {
        self.check_dim(other)?;
        let mut sum = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (ca, va) = self.entries[i];
            let (cb, vb) = other.entries[j];
            match ca.cmp(&cb) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += va * vb;
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(sum)
    }

    /// Squared Euclidean distance via sparse merge.
    pub fn squared_distance(&self, other: &FeatureVector) -> Result<f64> {
        self.check_dim(other)?;
        let mut sum = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let ca = self.entries.get(i).map(|e| e.0);
            let cb = other.entries.get(j).map(|e| e.0);
            match (ca, cb) {
                (Some(a), Some(b)) if a == b => {
                    let d = self.entries[i].1 - other.entries[j].1;
                    sum += d * d;
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    sum += self.entries[i].1 * self.entries[i].1;
                    i += 1;
                }
                (Some(_), Some(_)) => {
                    sum += other.entries[j].1 * other.entries[j].1;
                    j += 1;
                }
                (Some(_), None) => {
                    sum += self.entries[i].1 * self.entries[i].1;
                    i += 1;
                }
                (None, Some(_)) => {
                    sum += other.entries[j].1 * other.entries[j].1;
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Ok(sum)
    }

    pub fn scaled(&self, factor: f64) -> FeatureVector {
        FeatureVector {
            dim: self.dim,
            entries: self.entries.iter().map(|&(c, v)| (c, v * factor)).collect(),
        }
    }

    fn check_dim(&self, other: &FeatureVector) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, LabeledCorpus};
    use proptest::prelude::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn corpus_of(texts: &[&str]) -> LabeledCorpus {
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::from_raw(format!("d{i}"), "x", t).unwrap())
            .collect();
        LabeledCorpus::from_documents(docs).unwrap()
    }

    #[test]
    fn char_ngram_windows() {
        assert_eq!(char_ngrams(&toks(&["नदी"]), 2).unwrap(), vec!["नद", "दी"]);
        assert_eq!(char_ngrams(&toks(&["नदी"]), 1).unwrap(), vec!["न", "द", "ी"]);
        assert!(char_ngrams(&toks(&["ना"]), 3).unwrap().is_empty());
        assert!(char_ngrams(&toks(&[]), 2).unwrap().is_empty());
        assert!(char_ngrams(&toks(&["नदी"]), 0).is_err());
        // windows never cross the token boundary
        assert_eq!(
            char_ngrams(&toks(&["नदी", "घाट"]), 3).unwrap(),
            vec!["नदी", "घाट"]
        );
    }

    #[test]
    fn word_ngram_windows() {
        assert_eq!(
            word_ngrams(&toks(&["क", "ख", "ग"]), 2).unwrap(),
            vec!["क ख", "ख ग"]
        );
        assert_eq!(word_ngrams(&toks(&["क"]), 1).unwrap(), vec!["क"]);
        assert!(word_ngrams(&toks(&["क", "ख"]), 3).unwrap().is_empty());
        assert!(word_ngrams(&toks(&["क"]), 0).is_err());
    }

    #[test]
    fn phoneme_profiles_filter_by_class() {
        assert_eq!(phoneme_profile(&toks(&["का"]), ProfileKind::Consonants), vec!["क"]);
        assert_eq!(
            phoneme_profile(&toks(&["का"]), ProfileKind::PhonemesPlusMatras),
            vec!["क", "ा"]
        );
        assert!(phoneme_profile(&toks(&["अ"]), ProfileKind::Matras).is_empty());
        assert_eq!(phoneme_profile(&toks(&["अं"]), ProfileKind::Matras), vec!["ं"]);
        assert_eq!(phoneme_profile(&toks(&["अं"]), ProfileKind::Phonemes), vec!["अ"]);
    }

    #[test]
    fn spec_string_round_trip() {
        for s in ["c2:freq", "c3,w3:tfidf", "ph:count", "c1,c2,c3,w1,phmat:freq"] {
            let spec: FeatureSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        // default weighting is relative frequency
        let spec: FeatureSpec = "c3,w3".parse().unwrap();
        assert_eq!(spec.weighting, Weighting::RelativeFrequency);
        assert_eq!(spec.to_string(), "c3,w3:freq");

        for bad in ["", "c0:freq", "c6:freq", "x3:freq", "c3:loud", "c3,c3:freq", ":freq"] {
            assert!(bad.parse::<FeatureSpec>().is_err(), "`{bad}` should not parse");
        }
    }

    #[test]
    fn fit_counts_doc_freq_and_applies_threshold() {
        let corpus = corpus_of(&["क ख", "क ग"]);
        let mut spec = FeatureSpec::new(
            vec![FeatureAtom::WordNgram(1)],
            Weighting::Counts,
        )
        .unwrap();
        let vocab = fit_vocabulary(&corpus, &spec).unwrap();
        let rows: Vec<(usize, &str, usize)> = vocab.entries().collect();
        assert_eq!(rows, vec![(0, "क", 2), (0, "ख", 1), (0, "ग", 1)]);
        assert_eq!(vocab.n_docs(), 2);

        spec.min_doc_freq = 2;
        let pruned = fit_vocabulary(&corpus, &spec).unwrap();
        let rows: Vec<(usize, &str, usize)> = pruned.entries().collect();
        assert_eq!(rows, vec![(0, "क", 2)]);

        spec.min_doc_freq = 3;
        assert!(matches!(
            fit_vocabulary(&corpus, &spec),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn max_features_rank_and_tiebreak() {
        // क appears twice (kept first); ख and ग tie on frequency 1 and ख
        // wins lexicographically
        let corpus = corpus_of(&["क ख", "क ग"]);
        let mut spec =
            FeatureSpec::new(vec![FeatureAtom::WordNgram(1)], Weighting::Counts).unwrap();
        spec.max_features = Some(2);
        let vocab = fit_vocabulary(&corpus, &spec).unwrap();
        let terms: Vec<&str> = vocab.entries().map(|(_, t, _)| t).collect();
        assert_eq!(terms, vec!["क", "ख"]);
    }

    #[test]
    fn combined_spec_blocks_columns_per_atom() {
        let corpus = corpus_of(&["क ख"]);
        let spec = FeatureSpec::new(
            vec![FeatureAtom::CharNgram(1), FeatureAtom::WordNgram(1)],
            Weighting::Counts,
        )
        .unwrap();
        let vocab = fit_vocabulary(&corpus, &spec).unwrap();
        // "क" and "ख" appear once per atom, under distinct columns
        let rows: Vec<(usize, &str, usize)> = vocab.entries().collect();
        assert_eq!(
            rows,
            vec![(0, "क", 1), (0, "ख", 1), (1, "क", 1), (1, "ख", 1)]
        );
    }

    #[test]
    fn vectorize_counts_and_relative_frequency() {
        let corpus = corpus_of(&["क क ख", "क"]);
        let mut spec =
            FeatureSpec::new(vec![FeatureAtom::WordNgram(1)], Weighting::Counts).unwrap();
        let vocab = fit_vocabulary(&corpus, &spec).unwrap();
        let v = vocab.vectorize(&toks(&["क", "क"])).unwrap();
        assert_eq!(v.entries(), &[(0, 2.0)]);

        spec.weighting = Weighting::RelativeFrequency;
        let vocab = fit_vocabulary(&corpus, &spec).unwrap();
        // ग is out of vocabulary; the denominator counts in-vocab terms only
        let v = vocab.vectorize(&toks(&["क", "ग"])).unwrap();
        assert_eq!(v.entries(), &[(0, 1.0)]);
        // nothing in vocabulary: zero vector
        let v = vocab.vectorize(&toks(&["घ"])).unwrap();
        assert_eq!(v.nnz(), 0);
    }

    #[test]
    fn tfidf_matches_hand_computation() {
        // 3 fitting docs: क in all 3, ख in 1. idf(क)=ln(4/4)+1=1,
        // idf(ख)=ln(4/2)+1. Doc {क:2, ख:1} → unnormalized [2, ln 2 + 1],
        // then L2-normalize. Oracle computed inline from those raw
        // definitions.
        let corpus = corpus_of(&["क ख", "क", "क"]);
        let spec =
            FeatureSpec::new(vec![FeatureAtom::WordNgram(1)], Weighting::TfIdf).unwrap();
        let vocab = fit_vocabulary(&corpus, &spec).unwrap();
        let v = vocab.vectorize(&toks(&["क", "क", "ख"])).unwrap();

        let idf_k = (4.0f64 / 4.0).ln() + 1.0;
        let idf_kh = (4.0f64 / 2.0).ln() + 1.0;
        let raw = [2.0 * idf_k, 1.0 * idf_kh];
        let norm = (raw[0] * raw[0] + raw[1] * raw[1]).sqrt();
        let expect = [raw[0] / norm, raw[1] / norm];

        assert_eq!(v.dim(), 2);
        let dense = v.to_dense();
        assert!((dense[0] - expect[0]).abs() < 1e-9, "{dense:?} vs {expect:?}");
        assert!((dense[1] - expect[1]).abs() < 1e-9);
        assert!((v.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vector_ops() {
        let a = FeatureVector::from_dense(&[1.0, 2.0, 3.0]).unwrap();
        let b = FeatureVector::from_dense(&[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(a.dot(&b).unwrap(), 10.0);
        assert_eq!(a.get(1), 2.0);
        assert_eq!(a.get(5), 0.0);
        let c = FeatureVector::from_dense(&[2.0, 3.0, 4.0]).unwrap();
        let d = FeatureVector::from_dense(&[1.0, 1.0, 1.0]).unwrap();
        assert!((c.squared_distance(&d).unwrap() - 14.0).abs() < 1e-12);
        let short = FeatureVector::zeros(2);
        assert!(a.dot(&short).is_err());
        assert!(FeatureVector::from_entries(2, vec![(2, 1.0)]).is_err());
        assert!(FeatureVector::from_entries(3, vec![(1, 1.0), (1, 2.0)]).is_err());
        // zeros are dropped, not stored
        let z = FeatureVector::from_entries(3, vec![(0, 0.0), (2, 5.0)]).unwrap();
        assert_eq!(z.nnz(), 1);
    }

    proptest! {
        // Vocabulary must not depend on document order.
        #[test]
        fn fit_is_order_independent(seed in 0u64..500) {
            let texts = ["क ख ग", "ख ग घ", "ग घ ङ", "क ङ"];
            let mut rotated: Vec<&str> = texts.to_vec();
            rotated.rotate_left((seed % 4) as usize);
            let spec = FeatureSpec::new(
                vec![FeatureAtom::CharNgram(1), FeatureAtom::WordNgram(2)],
                Weighting::TfIdf,
            ).unwrap();
            let a = fit_vocabulary(&corpus_of(&texts), &spec).unwrap();
            let b = fit_vocabulary(&corpus_of(&rotated), &spec).unwrap();
            let rows_a: Vec<(usize, String, usize)> =
                a.entries().map(|(i, t, d)| (i, t.to_string(), d)).collect();
            let rows_b: Vec<(usize, String, usize)> =
                b.entries().map(|(i, t, d)| (i, t.to_string(), d)).collect();
            prop_assert_eq!(rows_a, rows_b);
        }

        // Count conservation: vector sum equals in-vocabulary occurrences.
        #[test]
        fn count_conservation(words in proptest::collection::vec("[कखगघङ]{1,3}", 1..12)) {
            let corpus = corpus_of(&["क ख ग घ ङ कख खग"]);
            let spec = FeatureSpec::new(
                vec![FeatureAtom::WordNgram(1)],
                Weighting::Counts,
            ).unwrap();
            let vocab = fit_vocabulary(&corpus, &spec).unwrap();
            let tokens = toks(&words.iter().map(|s| s.as_str()).collect::<Vec<_>>());
            let v = vocab.vectorize(&tokens).unwrap();
            let vecsum: f64 = v.entries().iter().map(|&(_, x)| x).sum();
            let invocab = tokens.iter().filter(|t| {
                vocab.entries().any(|(_, term, _)| term == t.as_str())
            }).count();
            prop_assert!((vecsum - invocab as f64).abs() < 1e-9);
        }

        // TF-IDF vectors are unit length unless all terms are OOV.
        #[test]
        fn tfidf_norm_is_unit_or_zero(words in proptest::collection::vec("[कखगघ]{1,2}", 0..10)) {
            let corpus = corpus_of(&["क ख", "ग क", "घ"]);
            let spec = FeatureSpec::new(
                vec![FeatureAtom::WordNgram(1)],
                Weighting::TfIdf,
            ).unwrap();
            let vocab = fit_vocabulary(&corpus, &spec).unwrap();
            let tokens = toks(&words.iter().map(|s| s.as_str()).collect::<Vec<_>>());
            let norm = vocab.vectorize(&tokens).unwrap().norm();
            prop_assert!(norm < 1e-9 || (norm - 1.0).abs() < 1e-9, "norm {norm}");
        }

        // idf strictly decreases as doc_freq rises.
        #[test]
        fn idf_monotonic(df in 1usize..50, n_extra in 1usize..50) {
            let vocab_lo = Vocabulary::from_parts(
                "w1:tfidf".parse().unwrap(),
                vec![(0, "t".into())],
                vec![df],
                df + n_extra,
            ).unwrap();
            let vocab_hi = Vocabulary::from_parts(
                "w1:tfidf".parse().unwrap(),
                vec![(0, "t".into())],
                vec![df + 1],
                df + n_extra,
            ).unwrap();
            prop_assert!(vocab_lo.idf(0) > vocab_hi.idf(0));
        }
    }
}
