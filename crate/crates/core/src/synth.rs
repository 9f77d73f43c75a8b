//! Synthetic corpora and training sets for tests and benchmarks.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::classify::TrainingSet;
use crate::corpus::{Document, LabeledCorpus};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::rng::{derive_rng, STREAM_SYNTH};
use crate::script::{classify_char, CharClass};

/// Characters per synthetic language inventory.
pub const INVENTORY_SIZE: usize = 20;

/// Distinct characters, disjoint across languages. The first entries are
/// the Devanagari code points the sanitizer keeps, in code-point order, so
/// corpora over the first 5 languages survive a round trip through the
/// on-disk loader. Later languages draw CJK ideographs: fine for in-memory
/// pipelines, stripped by sanitization.
fn pool(n: usize) -> Vec<char> {
    let mut chars: Vec<char> = (0x0900..=0x097F_u32)
        .filter_map(char::from_u32)
        .filter(|&c| {
            matches!(
                classify_char(c),
                CharClass::IndependentVowel
                    | CharClass::Consonant
                    | CharClass::Matra
                    | CharClass::Sign
            )
        })
        .collect();
    let mut next = 0x4E00_u32;
    while chars.len() < n {
        if let Some(c) = char::from_u32(next) {
            chars.push(c);
        }
        next += 1;
    }
    chars.truncate(n);
    chars
}

/// A corpus of `n_langs` artificial languages with pairwise disjoint
/// 20-character inventories: any character-level feature separates them
/// perfectly. `doc` ids and `lang` names are zero-padded for stable
/// ordering.
pub fn separable_corpus(
    n_langs: usize,
    docs_per_lang: usize,
    tokens_per_doc: usize,
    seed: u64,
) -> Result<LabeledCorpus> {
    if n_langs == 0 || docs_per_lang == 0 || tokens_per_doc == 0 {
        return Err(Error::InvalidArgument(
            "separable_corpus needs at least one language, document, and token".into(),
        ));
    }
    if n_langs > 50 {
        return Err(Error::InvalidArgument("at most 50 synthetic languages".into()));
    }
    let pool = pool(n_langs * INVENTORY_SIZE);
    let mut rng = derive_rng(seed, STREAM_SYNTH);
    let mut docs = Vec::with_capacity(n_langs * docs_per_lang);
    for li in 0..n_langs {
        let inventory = &pool[li * INVENTORY_SIZE..(li + 1) * INVENTORY_SIZE];
        for di in 0..docs_per_lang {
            let tokens: Vec<String> = (0..tokens_per_doc)
                .map(|_| {
                    let len = rng.random_range(3..=6);
                    (0..len)
                        .map(|_| inventory[rng.random_range(0..inventory.len())])
                        .collect()
                })
                .collect();
            docs.push(Document {
                id: format!("doc{di:03}"),
                language: format!("lang{li:02}"),
                raw_text: tokens.join(" "),
                tokens,
            });
        }
    }
    LabeledCorpus::from_documents(docs)
}

/// Materialize a corpus as `<root>/<language>/<id>.txt` for loader and CLI
/// tests. Only useful when the documents' text survives sanitization.
pub fn write_corpus_dir(root: &Path, corpus: &LabeledCorpus) -> Result<()> {
    for doc in corpus.documents() {
        let dir = root.join(&doc.language);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join(format!("{}.txt", doc.id));
        fs::write(&path, &doc.raw_text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Two Gaussian clusters in 2-D at (−sep, −sep) and (+sep, +sep), labels
/// `neg`/`pos`.
pub fn gaussian_blobs(per_class: usize, sep: f64, sigma: f64, seed: u64) -> Result<TrainingSet> {
    if per_class < 1 {
        return Err(Error::InvalidArgument("per_class must be positive".into()));
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|_| Error::InvalidArgument("sigma must be finite and positive".into()))?;
    let mut rng = derive_rng(seed, STREAM_SYNTH);
    let mut vectors = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for label in 0..2 {
        let center = if label == 0 { -sep } else { sep };
        for _ in 0..per_class {
            let x = center + normal.sample(&mut rng);
            let y = center + normal.sample(&mut rng);
            vectors.push(FeatureVector::from_dense(&[x, y])?);
            labels.push(label);
        }
    }
    TrainingSet::new(vectors, labels, vec!["neg".into(), "pos".into()])
}
