//! Vector and set similarity, plus averaged language-pair matrices.

use std::collections::BTreeSet;
use std::str::FromStr;

use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};
use crate::features::{fit_vocabulary, FeatureSpec, FeatureVector};
use crate::numfmt::fixed_half_up;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Cosine,
    Euclidean,
    Jaccard,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Cosine => "cosine",
            Measure::Euclidean => "euclidean",
            Measure::Jaccard => "jaccard",
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Measure> {
        match s {
            "cosine" => Ok(Measure::Cosine),
            "euclidean" => Ok(Measure::Euclidean),
            "jaccard" => Ok(Measure::Jaccard),
            other => Err(Error::InvalidArgument(format!("unknown measure `{other}`"))),
        }
    }
}

/// Cosine of the angle between two vectors; 0 when either norm is 0.
pub fn cosine(u: &FeatureVector, v: &FeatureVector) -> Result<f64> {
    let dot = u.dot(v)?;
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (nu * nv))
}

/// Euclidean distance.
pub fn euclidean(u: &FeatureVector, v: &FeatureVector) -> Result<f64> {
    Ok(u.squared_distance(v)?.sqrt())
}

/// Jaccard index of two term sets; 1.0 when both are empty.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// An L×L matrix of averaged cross-language similarities.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    labels: Vec<String>,
    values: Vec<Vec<f64>>,
    measure: Measure,
}

impl SimilarityMatrix {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    /// TSV with a label header row and label-prefixed rows. Cosine and
    /// Jaccard print 3 decimals, Euclidean 2, like the usual reports.
    pub fn to_tsv(&self) -> String {
        let decimals = match self.measure {
            Measure::Euclidean => 2,
            _ => 3,
        };
        let mut out = String::new();
        for label in &self.labels {
            out.push('\t');
            out.push_str(label);
        }
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.values) {
            out.push_str(label);
            for v in row {
                out.push('\t');
                out.push_str(&fixed_half_up(*v, decimals));
            }
            out.push('\n');
        }
        out
    }
}

/// Average pairwise similarity between every pair of languages.
///
/// Entry (i, j), i ≠ j, is the mean of the measure over all cross pairs
/// (dᵢ, dⱼ) of documents. Vectors use a vocabulary fitted on the whole
/// corpus under `spec`; Jaccard uses word-unigram sets instead. Diagonals
/// are fixed by convention: 1.0 for cosine/Jaccard, 0.0 for Euclidean.
pub fn language_pair_matrix(
    corpus: &LabeledCorpus,
    spec: &FeatureSpec,
    measure: Measure,
) -> Result<SimilarityMatrix> {
    let labels = corpus.labels().to_vec();
    let groups = corpus.indices_by_label();

    enum Repr {
        Vectors(Vec<FeatureVector>),
        Sets(Vec<BTreeSet<String>>),
    }
    let repr = match measure {
        Measure::Jaccard => Repr::Sets(par::map_collect(corpus.documents(), |doc| {
            doc.tokens.iter().cloned().collect()
        })),
        _ => {
            let vocab = fit_vocabulary(corpus, spec)?;
            let vectors = par::map_collect(corpus.documents(), |doc| vocab.vectorize(&doc.tokens));
            Repr::Vectors(vectors.into_iter().collect::<Result<Vec<_>>>()?)
        }
    };

    let n = labels.len();
    let diagonal = match measure {
        Measure::Euclidean => 0.0,
        _ => 1.0,
    };
    let mut values = vec![vec![diagonal; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let pairs: Vec<(usize, usize)> = groups[i]
                .iter()
                .flat_map(|&a| groups[j].iter().map(move |&b| (a, b)))
                .collect();
            let sims = par::map_collect(&pairs, |&(a, b)| match &repr {
                Repr::Vectors(vs) => match measure {
                    Measure::Cosine => cosine(&vs[a], &vs[b]),
                    Measure::Euclidean => euclidean(&vs[a], &vs[b]),
                    Measure::Jaccard => unreachable!(),
                },
                Repr::Sets(sets) => Ok(jaccard(&sets[a], &sets[b])),
            });
            let sims: Vec<f64> = sims.into_iter().collect::<Result<Vec<_>>>()?;
            let mean = par::pairwise_sum(&sims) / sims.len() as f64;
            values[i][j] = mean;
            values[j][i] = mean;
        }
    }
    Ok(SimilarityMatrix {
        labels,
        values,
        measure,
    })
}
