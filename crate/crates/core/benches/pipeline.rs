//! Stage benchmarks over a synthetic corpus, comparing thread-pool sizes.
//!
//! Built with the default `parallel` feature this runs every stage under
//! rayon pools of 1 and N threads; built with `--no-default-features` the
//! core is sequential and each stage runs once, unlabeled.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use devlid::classify::{Model, TrainConfig, TrainingSet, Variant};
use devlid::corpus::LabeledCorpus;
use devlid::eval;
use devlid::features::{fit_vocabulary, FeatureSpec};
use devlid::similarity::{language_pair_matrix, Measure};
use devlid::synth;

struct Pool {
    label: String,
    #[cfg(feature = "parallel")]
    inner: Option<rayon::ThreadPool>,
}

impl Pool {
    fn run<R>(&self, f: impl FnOnce() -> R + Send) -> R
    where
        R: Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.inner {
            return pool.install(f);
        }
        f()
    }
}

#[cfg(feature = "parallel")]
fn pools() -> Vec<Pool> {
    let n = std::thread::available_parallelism().map_or(4, usize::from);
    [1, n]
        .iter()
        .map(|&t| Pool {
            label: format!("{t}-threads"),
            inner: Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .expect("pool"),
            ),
        })
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn pools() -> Vec<Pool> {
    vec![Pool {
        label: "sequential".into(),
    }]
}

fn corpus() -> LabeledCorpus {
    synth::separable_corpus(6, 40, 40, 17).expect("synthetic corpus")
}

fn config() -> TrainConfig {
    let mut cfg = TrainConfig {
        seed: 17,
        ..TrainConfig::default()
    };
    cfg.forest.n_trees = 40;
    cfg.svm.epochs = 20;
    cfg
}

fn training_set(corpus: &LabeledCorpus, spec: &FeatureSpec) -> TrainingSet {
    let vocab = fit_vocabulary(corpus, spec).unwrap();
    let vectors = corpus
        .documents()
        .iter()
        .map(|d| vocab.vectorize(&d.tokens).unwrap())
        .collect();
    let labels = corpus
        .documents()
        .iter()
        .map(|d| corpus.label_index(&d.language).unwrap())
        .collect();
    TrainingSet::new(vectors, labels, corpus.labels().to_vec()).unwrap()
}

fn bench_stages(c: &mut Criterion) {
    let corpus = corpus();
    let spec: FeatureSpec = "c2,c3:tfidf".parse().unwrap();
    let cfg = config();
    let data = training_set(&corpus, &spec);

    let mut group = c.benchmark_group("vectorize");
    group.sample_size(10);
    for pool in pools() {
        group.bench_function(BenchmarkId::from_parameter(&pool.label), |b| {
            b.iter(|| pool.run(|| training_set(&corpus, &spec)))
        });
    }
    group.finish();

    for variant in [Variant::Svm, Variant::Forest] {
        let mut group = c.benchmark_group(format!("train-{}", variant.name()));
        group.sample_size(10);
        for pool in pools() {
            group.bench_function(BenchmarkId::from_parameter(&pool.label), |b| {
                b.iter(|| pool.run(|| Model::train(variant, &data, &cfg).unwrap()))
            });
        }
        group.finish();
    }

    let mut group = c.benchmark_group("experiment-svm");
    group.sample_size(10);
    for pool in pools() {
        group.bench_function(BenchmarkId::from_parameter(&pool.label), |b| {
            b.iter(|| {
                pool.run(|| eval::run_experiment(&corpus, &spec, Variant::Svm, &cfg, 0.25).unwrap())
            })
        });
    }
    group.finish();

    let mut group = c.benchmark_group("pair-similarity");
    group.sample_size(10);
    for pool in pools() {
        group.bench_function(BenchmarkId::from_parameter(&pool.label), |b| {
            b.iter(|| pool.run(|| language_pair_matrix(&corpus, &spec, Measure::Cosine).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_stages);
criterion_main!(benches);
