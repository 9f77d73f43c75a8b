//! devlid: identify the language of Devanagari-script text.

use std::fs;
use std::io::{BufRead, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use devlid::classify::{TrainConfig, Variant};
use devlid::corpus::{compute_stats, load_corpus, CorpusLoad};
use devlid::eval::{run_experiment, ExperimentResult};
use devlid::features::FeatureSpec;
use devlid::model_io::TrainedModel;
use devlid::similarity::{language_pair_matrix, Measure};
use devlid::Error;

#[derive(Parser)]
#[command(
    name = "devlid",
    version,
    about = "Language identification toolkit for Devanagari-script text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by the experiment-shaped subcommands.
#[derive(Args, Clone)]
struct ExperimentArgs {
    /// Corpus root: one subdirectory per language
    #[arg(long)]
    corpus: PathBuf,

    /// Classifier variant
    #[arg(long, default_value = "svm")]
    classifier: String,

    /// Seed for splitting, training, and every other random draw
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Fraction of each language held out for testing
    #[arg(long, default_value_t = 0.25)]
    test_fraction: f64,

    /// Directory that receives the run's artifacts
    #[arg(long)]
    out: PathBuf,

    /// Hyperparameter override, repeatable (e.g. --set svm.lambda=1e-3)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-language corpus statistics as TSV
    Stats {
        #[arg(long)]
        corpus: PathBuf,
    },

    /// Pairwise language similarity matrix as TSV
    Similarity {
        #[arg(long)]
        corpus: PathBuf,

        #[arg(long, default_value = "cosine")]
        measure: String,

        /// Feature spec for the vector-based measures
        #[arg(long, default_value = "c1")]
        features: String,
    },

    /// Train a classifier and save the model file
    Train {
        #[command(flatten)]
        experiment: ExperimentArgs,

        /// Feature spec, e.g. c3,w3:tfidf
        #[arg(long, default_value = "c3,w3:tfidf")]
        features: String,
    },

    /// Train and score on a held-out split; writes metrics and confusion TSVs
    Evaluate {
        #[command(flatten)]
        experiment: ExperimentArgs,

        #[arg(long, default_value = "c3,w3:tfidf")]
        features: String,
    },

    /// Classify documents with a saved model
    Predict {
        #[arg(long)]
        model: PathBuf,

        /// Input files, one document each; stdin lines when absent
        inputs: Vec<PathBuf>,
    },

    /// Evaluate several feature specs and rank them
    Sweep {
        #[command(flatten)]
        experiment: ExperimentArgs,

        /// Feature spec to include, repeatable
        #[arg(long = "features", required = true)]
        features: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 = usage or input problem, 3 = bad model file, 1 = internal failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::ModelFormat(_)) => 3,
        Some(Error::Train(_)) => 1,
        Some(_) => 2,
        None => 2,
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Stats { corpus } => cmd_stats(&corpus),
        Command::Similarity {
            corpus,
            measure,
            features,
        } => cmd_similarity(&corpus, &measure, &features),
        Command::Train {
            experiment,
            features,
        } => cmd_train(&experiment, &features),
        Command::Evaluate {
            experiment,
            features,
        } => cmd_evaluate(&experiment, &features),
        Command::Predict { model, inputs } => cmd_predict(&model, &inputs),
        Command::Sweep {
            experiment,
            features,
        } => cmd_sweep(&experiment, &features),
    }
}

fn load(corpus_root: &Path) -> anyhow::Result<CorpusLoad> {
    let load = load_corpus(corpus_root)?;
    for skip in &load.skipped {
        eprintln!("warning: skipped {}: {}", skip.path.display(), skip.reason);
    }
    Ok(load)
}

fn cmd_stats(corpus_root: &Path) -> anyhow::Result<()> {
    let load = load(corpus_root)?;
    print!("{}", compute_stats(&load.corpus).to_tsv());
    Ok(())
}

fn cmd_similarity(corpus_root: &Path, measure: &str, features: &str) -> anyhow::Result<()> {
    let measure: Measure = measure.parse()?;
    let spec: FeatureSpec = features.parse()?;
    let load = load(corpus_root)?;
    let matrix = language_pair_matrix(&load.corpus, &spec, measure)?;
    print!("{}", matrix.to_tsv());
    Ok(())
}

/// Resolved settings for one experiment run.
struct Resolved {
    variant: Variant,
    cfg: TrainConfig,
    spec: FeatureSpec,
}

fn resolve(args: &ExperimentArgs, features: &str) -> anyhow::Result<Resolved> {
    let variant: Variant = args.classifier.parse()?;
    let mut cfg = TrainConfig {
        seed: args.seed,
        ..TrainConfig::default()
    };
    let mut spec: FeatureSpec = features.parse()?;
    for pair in &args.set {
        apply_override(&mut cfg, &mut spec, pair)?;
    }
    Ok(Resolved { variant, cfg, spec })
}

fn apply_override(cfg: &mut TrainConfig, spec: &mut FeatureSpec, pair: &str) -> anyhow::Result<()> {
    let bad = |what: &str| Error::InvalidArgument(format!("--set {pair}: {what}"));
    let (key, value) = pair
        .split_once('=')
        .ok_or_else(|| bad("expected KEY=VALUE"))?;

    fn parse<T: std::str::FromStr>(value: &str, err: Error) -> Result<T, Error> {
        value.trim().parse().map_err(|_| err)
    }

    match key {
        "svm.lambda" => cfg.svm.lambda = parse(value, bad("not a real"))?,
        "svm.epochs" => cfg.svm.epochs = parse(value, bad("not a count"))?,
        "knn.k" => cfg.knn.k = parse(value, bad("not a count"))?,
        "forest.n_trees" => cfg.forest.n_trees = parse(value, bad("not a count"))?,
        "forest.min_leaf" => cfg.forest.min_leaf = parse(value, bad("not a count"))?,
        "forest.max_depth" => {
            cfg.forest.max_depth = if value.trim() == "none" {
                None
            } else {
                Some(parse(value, bad("not a count or `none`"))?)
            }
        }
        "nb.var_smoothing_factor" => {
            cfg.nb.var_smoothing_factor = parse(value, bad("not a real"))?
        }
        "mlp.hidden" => {
            let sizes: Vec<usize> = value
                .split(',')
                .map(|v| parse(v, bad("not a pair of counts")))
                .collect::<Result<_, _>>()?;
            if sizes.len() != 2 {
                return Err(bad("expected exactly two sizes, e.g. 256,64").into());
            }
            cfg.mlp.hidden = [sizes[0], sizes[1]];
        }
        "mlp.learning_rate" => cfg.mlp.learning_rate = parse(value, bad("not a real"))?,
        "mlp.dropout_rate" => cfg.mlp.dropout_rate = parse(value, bad("not a real"))?,
        "mlp.batch_size" => cfg.mlp.batch_size = parse(value, bad("not a count"))?,
        "mlp.epochs" => cfg.mlp.epochs = parse(value, bad("not a count"))?,
        "features.max_features" => {
            spec.max_features = if value.trim() == "none" {
                None
            } else {
                Some(parse(value, bad("not a count or `none`"))?)
            }
        }
        "features.min_doc_freq" => spec.min_doc_freq = parse(value, bad("not a count"))?,
        _ => return Err(bad("unknown key").into()),
    }
    Ok(())
}

/// Stable key=value block shared by every manifest; no timestamps, so
/// reruns of the same configuration produce identical bytes.
fn manifest_common(
    command: &str,
    args: &ExperimentArgs,
    resolved: &Resolved,
    corpus: &devlid::corpus::LabeledCorpus,
) -> String {
    let cfg = &resolved.cfg;
    let mut out = String::new();
    out.push_str(&format!("command={command}\n"));
    out.push_str(&format!("corpus={}\n", args.corpus.display()));
    out.push_str(&format!("documents={}\n", corpus.len()));
    out.push_str(&format!("languages={}\n", corpus.labels().len()));
    out.push_str(&format!("features={}\n", resolved.spec));
    out.push_str(&format!(
        "features.max_features={}\n",
        resolved
            .spec
            .max_features
            .map_or_else(|| "none".to_string(), |v| v.to_string())
    ));
    out.push_str(&format!("features.min_doc_freq={}\n", resolved.spec.min_doc_freq));
    out.push_str(&format!("classifier={}\n", resolved.variant.name()));
    out.push_str(&format!("seed={}\n", cfg.seed));
    out.push_str(&format!("test_fraction={}\n", args.test_fraction));
    out.push_str(&format!("svm.lambda={}\n", cfg.svm.lambda));
    out.push_str(&format!("svm.epochs={}\n", cfg.svm.epochs));
    out.push_str(&format!("knn.k={}\n", cfg.knn.k));
    out.push_str(&format!("forest.n_trees={}\n", cfg.forest.n_trees));
    out.push_str(&format!(
        "forest.max_depth={}\n",
        cfg.forest
            .max_depth
            .map_or_else(|| "none".to_string(), |d| d.to_string())
    ));
    out.push_str(&format!("forest.min_leaf={}\n", cfg.forest.min_leaf));
    out.push_str(&format!(
        "nb.var_smoothing_factor={}\n",
        cfg.nb.var_smoothing_factor
    ));
    out.push_str(&format!(
        "mlp.hidden={},{}\n",
        cfg.mlp.hidden[0], cfg.mlp.hidden[1]
    ));
    out.push_str(&format!("mlp.learning_rate={}\n", cfg.mlp.learning_rate));
    out.push_str(&format!("mlp.dropout_rate={}\n", cfg.mlp.dropout_rate));
    out.push_str(&format!("mlp.batch_size={}\n", cfg.mlp.batch_size));
    out.push_str(&format!("mlp.epochs={}\n", cfg.mlp.epochs));
    out
}

fn write_out(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_train(args: &ExperimentArgs, features: &str) -> anyhow::Result<()> {
    let resolved = resolve(args, features)?;
    let load = load(&args.corpus)?;
    // fit and train on the train split only, mirroring `evaluate`: a later
    // evaluate with the same seed scores documents this model never saw
    let (train_c, test_c) = devlid::eval::split(&load.corpus, args.test_fraction, resolved.cfg.seed)?;
    let vocab = devlid::features::fit_vocabulary(&train_c, &resolved.spec)?;
    let vectors = train_c
        .documents()
        .iter()
        .map(|d| vocab.vectorize(&d.tokens))
        .collect::<Result<Vec<_>, _>>()?;
    let labels = train_c
        .documents()
        .iter()
        .map(|d| train_c.label_index(&d.language).expect("own label"))
        .collect();
    let data = devlid::classify::TrainingSet::new(vectors, labels, train_c.labels().to_vec())?;
    let model = devlid::classify::Model::train(resolved.variant, &data, &resolved.cfg)?;
    let trained = TrainedModel::new(vocab, train_c.labels().to_vec(), model)?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let model_path = args.out.join("model.devlid");
    trained.save(&model_path)?;

    let mut manifest = manifest_common("train", args, &resolved, &load.corpus);
    manifest.push_str(&format!("train_size={}\n", train_c.len()));
    manifest.push_str(&format!("test_size={}\n", test_c.len()));
    manifest.push_str(&format!("model={}\n", model_path.display()));
    write_out(&args.out, "run.manifest", &manifest)?;
    println!("saved {}", model_path.display());
    Ok(())
}

fn cmd_evaluate(args: &ExperimentArgs, features: &str) -> anyhow::Result<()> {
    let resolved = resolve(args, features)?;
    let load = load(&args.corpus)?;
    let result = run_experiment(
        &load.corpus,
        &resolved.spec,
        resolved.variant,
        &resolved.cfg,
        args.test_fraction,
    )?;

    let metrics_tsv = result.report.to_tsv();
    write_out(&args.out, "metrics.tsv", &metrics_tsv)?;
    write_out(&args.out, "confusion.tsv", &result.confusion.to_tsv())?;

    let mut manifest = manifest_common("evaluate", args, &resolved, &load.corpus);
    manifest.push_str(&format!("train_size={}\n", result.train_size));
    manifest.push_str(&format!("test_size={}\n", result.test_size));
    manifest.push_str(&format!("{}\n", accuracy_line(&metrics_tsv)));
    write_out(&args.out, "run.manifest", &manifest)?;

    print!("{metrics_tsv}");
    Ok(())
}

/// The `accuracy=…` trailer of a metrics TSV, reused verbatim in manifests
/// so the two artifacts can never disagree.
fn accuracy_line(metrics_tsv: &str) -> &str {
    metrics_tsv
        .lines()
        .rev()
        .find(|l| l.starts_with("accuracy="))
        .expect("metrics TSV carries an accuracy trailer")
}

fn cmd_predict(model_path: &Path, inputs: &[PathBuf]) -> anyhow::Result<()> {
    let trained = TrainedModel::load(model_path)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();

    let mut classify = |text: &str, origin: &str| -> anyhow::Result<()> {
        match trained.predict_text(text)? {
            Some(label) => writeln!(out, "{label}")?,
            None => {
                eprintln!("warning: {origin}: no Devanagari text after sanitization");
                writeln!(out, "UNKNOWN")?;
            }
        }
        Ok(())
    };

    if inputs.is_empty() {
        let stdin = std::io::stdin();
        for (i, line) in stdin.lock().lines().enumerate() {
            let line = line.context("reading stdin")?;
            classify(&line, &format!("stdin line {}", i + 1))?;
        }
    } else {
        for path in inputs {
            let mut text = String::new();
            fs::File::open(path)
                .and_then(|mut f| f.read_to_string(&mut text))
                .map_err(|e| Error::io(path, e))?;
            classify(&text, &path.display().to_string())?;
        }
    }
    Ok(())
}

fn cmd_sweep(args: &ExperimentArgs, features: &[String]) -> anyhow::Result<()> {
    let load = load(&args.corpus)?;
    let mut rows: Vec<(String, ExperimentResult)> = Vec::with_capacity(features.len());
    let mut resolved_for_manifest = None;
    for feature in features {
        let resolved = resolve(args, feature)?;
        let result = run_experiment(
            &load.corpus,
            &resolved.spec,
            resolved.variant,
            &resolved.cfg,
            args.test_fraction,
        )?;
        rows.push((resolved.spec.to_string(), result));
        resolved_for_manifest.get_or_insert(resolved);
    }

    // accuracy descending, ties by spec string
    rows.sort_by(|(sa, ra), (sb, rb)| {
        rb.report
            .accuracy
            .partial_cmp(&ra.report.accuracy)
            .expect("accuracies are finite")
            .then_with(|| sa.cmp(sb))
    });

    let mut board = String::from("features\taccuracy\tmacro_precision\tmacro_recall\tmacro_f1\n");
    for (spec, result) in &rows {
        let tsv = result.report.to_tsv();
        let accuracy = accuracy_line(&tsv).trim_start_matches("accuracy=");
        let macro_row = tsv
            .lines()
            .find(|l| l.starts_with("MACRO\t"))
            .expect("metrics TSV carries a MACRO row")
            .trim_start_matches("MACRO\t");
        board.push_str(&format!("{spec}\t{accuracy}\t{macro_row}\n"));
    }

    let resolved = resolved_for_manifest.expect("at least one spec");
    let mut manifest = manifest_common("sweep", args, &resolved, &load.corpus);
    manifest.push_str(&format!("sweep_size={}\n", rows.len()));
    for (i, feature) in features.iter().enumerate() {
        manifest.push_str(&format!("sweep.{i}={feature}\n"));
    }
    write_out(&args.out, "leaderboard.tsv", &board)?;
    write_out(&args.out, "run.manifest", &manifest)?;
    print!("{board}");
    Ok(())
}
