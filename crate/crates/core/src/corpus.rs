//! Corpus loading, document sanitization, and descriptive statistics.
//!
//! A corpus on disk is a directory with one subdirectory per language and
//! one UTF-8 text file per poem. Loading sanitizes every file, drops the
//! ones that contain no Devanagari at all, and produces a canonically
//! ordered [`LabeledCorpus`]: labels sorted lexicographically, documents
//! sorted by (language, id). Canonical order is what makes every
//! downstream seed-driven shuffle reproducible across file systems.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::numfmt::fixed_half_up;
use crate::par;
use crate::script::sanitize;

/// One sanitized poem.
#[derive(Debug, Clone)]
pub struct Document {
    /// Identifier unique within the language (the file stem on disk).
    pub id: String,
    pub language: String,
    /// Sanitized text: retained Devanagari characters and single spaces.
    pub raw_text: String,
    /// `raw_text` split on spaces; never empty, tokens never empty.
    pub tokens: Vec<String>,
}

impl Document {
    /// Sanitize `text` and build a document, or `None` if nothing survives.
    pub fn from_raw(id: impl Into<String>, language: impl Into<String>, text: &str) -> Option<Document> {
        let clean = sanitize(text);
        if clean.is_empty() {
            return None;
        }
        let tokens = clean.split(' ').map(str::to_owned).collect();
        Some(Document {
            id: id.into(),
            language: language.into(),
            raw_text: clean,
            tokens,
        })
    }
}

/// A canonically ordered set of labeled documents.
#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    documents: Vec<Document>,
    labels: Vec<String>,
}

impl LabeledCorpus {
    /// Build a corpus from documents, deriving the label set.
    ///
    /// Documents are re-sorted into canonical order; the label list is the
    /// sorted set of distinct languages. Errors if `docs` is empty.
    pub fn from_documents(mut docs: Vec<Document>) -> Result<LabeledCorpus> {
        if docs.is_empty() {
            return Err(Error::Corpus("corpus contains no admissible documents".into()));
        }
        docs.sort_by(|a, b| (a.language.as_str(), a.id.as_str()).cmp(&(b.language.as_str(), b.id.as_str())));
        let mut labels: Vec<String> = docs.iter().map(|d| d.language.clone()).collect();
        labels.sort();
        labels.dedup();
        Ok(LabeledCorpus { documents: docs, labels })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    /// Distinct languages, lexicographically sorted.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, language: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(language)).ok()
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Document indices per label, in canonical label order.
    pub(crate) fn indices_by_label(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.labels.len()];
        for (i, doc) in self.documents.iter().enumerate() {
            let li = self
                .label_index(&doc.language)
                .expect("document language always appears in the label set");
            groups[li].push(i);
        }
        groups
    }
}

/// A file the loader had to skip, with the reason.
#[derive(Debug, Clone)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

/// Result of [`load_corpus`]: the corpus plus a record of skipped files.
#[derive(Debug)]
pub struct CorpusLoad {
    pub corpus: LabeledCorpus,
    pub skipped: Vec<SkippedFile>,
}

/// Load a corpus directory tree.
///
/// Each immediate subdirectory of `root` names a language; every regular
/// file below it (recursively) is one poem, identified by its path
/// relative to the language directory. Files that are not valid UTF-8,
/// cannot be read, or sanitize to nothing are skipped and reported.
/// A missing root or a corpus with zero admissible documents is an error.
pub fn load_corpus(root: &Path) -> Result<CorpusLoad> {
    let mut lang_dirs: Vec<(String, PathBuf)> = Vec::new();
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if path.is_dir() {
            let name = entry.file_name().to_string_lossy().into_owned();
            lang_dirs.push((name, path));
        }
    }
    lang_dirs.sort();
    if lang_dirs.is_empty() {
        return Err(Error::Corpus(format!(
            "{}: no language subdirectories found",
            root.display()
        )));
    }

    // Gather (language, id, path) triples in deterministic order first…
    let mut files: Vec<(String, String, PathBuf)> = Vec::new();
    for (lang, dir) in &lang_dirs {
        let mut rel_paths = Vec::new();
        collect_files(dir, dir, &mut rel_paths)?;
        rel_paths.sort();
        for rel in rel_paths {
            let id = rel.to_string_lossy().replace(std::path::MAIN_SEPARATOR, "/");
            files.push((lang.clone(), id, dir.join(&rel)));
        }
    }

    // …then sanitize in parallel; order is preserved so skip reports and
    // document order do not depend on scheduling.
    let loaded = par::map_collect(&files, |(lang, id, path)| {
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) => return Err(SkippedFile { path: path.clone(), reason: format!("unreadable: {e}") }),
        };
        let text = match String::from_utf8(bytes) {
            Ok(t) => t,
            Err(_) => return Err(SkippedFile { path: path.clone(), reason: "invalid UTF-8".into() }),
        };
        match Document::from_raw(id.clone(), lang.clone(), &text) {
            Some(doc) => Ok(doc),
            None => Err(SkippedFile { path: path.clone(), reason: "no Devanagari text after sanitization".into() }),
        }
    });

    let mut docs = Vec::new();
    let mut skipped = Vec::new();
    for item in loaded {
        match item {
            Ok(doc) => docs.push(doc),
            Err(skip) => skipped.push(skip),
        }
    }
    if docs.is_empty() {
        return Err(Error::Corpus(format!(
            "{}: every file was skipped; no admissible documents",
            root.display()
        )));
    }
    Ok(CorpusLoad {
        corpus: LabeledCorpus::from_documents(docs)?,
        skipped,
    })
}

fn collect_files(base: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_files(base, &path, out)?;
        } else {
            let rel = path
                .strip_prefix(base)
                .expect("walk stays under base")
                .to_path_buf();
            out.push(rel);
        }
    }
    Ok(())
}

/// Word/character statistics for one language (or the whole corpus).
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageStats {
    pub language: String,
    /// Total token count.
    pub words: u64,
    /// Character count excluding spaces.
    pub chars: u64,
    /// chars / words.
    pub avg_word_len: f64,
    /// Tokens of 3 characters or fewer.
    pub short_words: u64,
    /// Tokens of 7 characters or more.
    pub long_words: u64,
}

/// Per-language rows in canonical order plus a TOTAL row.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub per_language: Vec<LanguageStats>,
    pub total: LanguageStats,
}

/// Compute corpus statistics. Character counts are `char` counts of the
/// sanitized text, so combining signs count like any other character.
pub fn compute_stats(corpus: &LabeledCorpus) -> CorpusStats {
    let mut acc: BTreeMap<&str, (u64, u64, u64, u64)> = BTreeMap::new();
    for label in corpus.labels() {
        acc.insert(label, (0, 0, 0, 0));
    }
    let per_doc = par::map_collect(corpus.documents(), |doc| {
        let mut words = 0u64;
        let mut chars = 0u64;
        let mut short = 0u64;
        let mut long = 0u64;
        for token in &doc.tokens {
            let len = token.chars().count() as u64;
            words += 1;
            chars += len;
            if len <= 3 {
                short += 1;
            }
            if len >= 7 {
                long += 1;
            }
        }
        (words, chars, short, long)
    });
    for (doc, (w, c, s, l)) in corpus.documents().iter().zip(&per_doc) {
        let entry = acc
            .get_mut(doc.language.as_str())
            .expect("stats accumulator seeded with every label");
        entry.0 += w;
        entry.1 += c;
        entry.2 += s;
        entry.3 += l;
    }

    let row = |language: &str, (words, chars, short, long): (u64, u64, u64, u64)| LanguageStats {
        language: language.to_owned(),
        words,
        chars,
        avg_word_len: if words == 0 { 0.0 } else { chars as f64 / words as f64 },
        short_words: short,
        long_words: long,
    };

    let mut per_language = Vec::with_capacity(corpus.labels().len());
    let mut total = (0, 0, 0, 0);
    for label in corpus.labels() {
        let cell = acc[label.as_str()];
        total.0 += cell.0;
        total.1 += cell.1;
        total.2 += cell.2;
        total.3 += cell.3;
        per_language.push(row(label, cell));
    }
    CorpusStats {
        per_language,
        total: row("TOTAL", total),
    }
}

impl CorpusStats {
    /// Tab-separated report: header, one row per language, TOTAL row last.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("language\twords\tchars\tavg_word_len\tshort_words\tlong_words\n");
        for stats in self.per_language.iter().chain(std::iter::once(&self.total)) {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                stats.language,
                stats.words,
                stats.chars,
                fixed_half_up(stats.avg_word_len, 2),
                stats.short_words,
                stats.long_words
            ));
        }
        out
    }
}
