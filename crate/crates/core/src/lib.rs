//! Language identification for Devanagari-script text.
//!
//! The pipeline: load a corpus laid out as one directory per language
//! ([`corpus`]), strip everything that is not retained Devanagari
//! ([`script`]), turn token streams into sparse count / relative-frequency
//! / TF-IDF vectors over character n-grams, word n-grams, and phoneme
//! profiles ([`features`]), then either compare languages pairwise
//! ([`similarity`]) or train one of five classifiers ([`classify`]) and
//! score it on a stratified held-out split ([`eval`]). Trained models
//! round-trip through a plain-text format ([`model_io`]).
//!
//! Every random choice (splits, shuffles, bootstraps, dropout) derives
//! from one explicit seed, and parallel execution (the default `parallel`
//! feature, via rayon) is bit-identical to sequential.

pub mod classify;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod model_io;
pub mod script;
pub mod similarity;
pub mod synth;

mod numfmt;
mod par;
mod rng;

pub use error::{Error, Result};
