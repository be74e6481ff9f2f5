//! Command-line front end: `ingest`, `select`, `benchmark`, `noise-sim`.
//! Every command is a pure function of its input files, flags and seed, and
//! every JSON artifact carries a provenance header (tool version, config
//! echo, seed) so runs can be reproduced byte for byte.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::bio::bio_is_select;
use crate::corpus::{
    build_vocabulary, load_corpus, save_matrix, stratified_kfold, vectorize_tfidf, DatasetFormat,
    LabeledCorpus, Stopwords,
};
use crate::e2sc::e2sc_select;
use crate::error::{Error, Result};
use crate::eval::{
    inject_label_noise, noise_removal_report, reports_to_csv, run_benchmark, BenchmarkConfig,
    EndModel,
};
use crate::methods::{bio_config_from_params, build_selector, e2sc_config_from_params, METHOD_NAMES};
use crate::weak::LogRegParams;

pub const STOPWORDS_ENV: &str = "PRUNEKIT_STOPWORDS";

#[derive(Parser)]
#[command(name = "prunekit", version, about = "Instance selection for text classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vectorize a dataset: vocabulary JSON, matrix binary, stats summary.
    Ingest(CommandArgs),
    /// Run one selection method and write the retained/removed partition.
    Select(CommandArgs),
    /// Cross-validated comparison of methods against the no-selection baseline.
    Benchmark(CommandArgs),
    /// Inject label noise and measure how much each method removes.
    #[command(name = "noise-sim")]
    NoiseSim(CommandArgs),
}

/// Raw flags before merging with an optional config file. Flags win.
#[derive(Args, Default)]
struct CommandArgs {
    /// Optional `key = value` config file; `#` starts a comment.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Dataset format: tsv or jsonl.
    #[arg(long)]
    format: Option<String>,
    /// Selection method (select) — one of the registry names.
    #[arg(long)]
    method: Option<String>,
    /// Comma-separated methods (benchmark, noise-sim).
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Method parameter override, repeatable: `--param key=value`.
    #[arg(long = "param")]
    params: Vec<String>,
    #[arg(long)]
    folds: Option<usize>,
    /// RNG seed. Mandatory: there is no wall-clock default.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread count; defaults to available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Minimum document frequency for vocabulary terms.
    #[arg(long)]
    min_df: Option<usize>,
    /// Label-noise injection rate (noise-sim).
    #[arg(long)]
    rate: Option<f64>,
    /// Downstream classifier for benchmark: logreg or knn.
    #[arg(long)]
    end_model: Option<String>,
    /// Neighborhood size when the end model is knn.
    #[arg(long)]
    knn_k: Option<usize>,
}

/// Fully resolved run configuration, echoed into every output artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub format: DatasetFormat,
    pub method: Option<String>,
    pub methods: Vec<String>,
    pub params: BTreeMap<String, String>,
    pub folds: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
    pub min_df: usize,
    pub rate: Option<f64>,
    pub end_model: String,
    pub knn_k: usize,
}

/// `key = value` lines, `#` comments, blank lines ignored.
fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut map = BTreeMap::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: line_no + 1,
            reason: "expected `key = value`".into(),
        })?;
        map.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    Ok(map)
}

fn parse_params(pairs: &[String]) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let (key, value) = pair.split_once('=').ok_or_else(|| Error::InvalidParam {
            key: pair.clone(),
            value: String::new(),
            reason: "expected key=value".into(),
        })?;
        map.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    Ok(map)
}

fn file_value<T, F>(file: &BTreeMap<String, String>, key: &str, parse: F) -> Result<Option<T>>
where
    F: FnOnce(&str) -> Result<T>,
{
    file.get(key).map(|v| parse(v)).transpose()
}

fn missing(flag: &str) -> Error {
    Error::Invalid(format!("--{flag} is required (flag or config file)"))
}

impl CommandArgs {
    /// Merge flags over the optional config file and validate.
    fn resolve(self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };
        let parse_usize = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Invalid(format!("not an integer: {v:?}")))
        };
        let dataset = self
            .dataset
            .or_else(|| file.get("dataset").map(PathBuf::from))
            .ok_or_else(|| missing("dataset"))?;
        let format: DatasetFormat = self
            .format
            .as_deref()
            .or(file.get("format").map(String::as_str))
            .unwrap_or("tsv")
            .parse()?;
        let method = self.method.or_else(|| file.get("method").cloned());
        let methods = match self.methods {
            Some(m) => m,
            None => file
                .get("methods")
                .map(|v| v.split(',').map(|s| s.trim().to_owned()).collect())
                .unwrap_or_default(),
        };
        // Params: explicit flags win per key over `param.<key>` file entries.
        let mut params: BTreeMap<String, String> = file
            .iter()
            .filter_map(|(k, v)| {
                k.strip_prefix("param.").map(|key| (key.to_owned(), v.clone()))
            })
            .collect();
        params.extend(parse_params(&self.params)?);
        let folds = match self.folds {
            Some(f) => f,
            None => file_value(&file, "folds", |v| parse_usize(v))?.unwrap_or(5),
        };
        let seed = match self.seed {
            Some(s) => s,
            None => file_value(&file, "seed", |v| {
                v.parse::<u64>()
                    .map_err(|_| Error::Invalid(format!("not a seed: {v:?}")))
            })?
            .ok_or_else(|| missing("seed"))?,
        };
        let out = self
            .out
            .or_else(|| file.get("out").map(PathBuf::from))
            .ok_or_else(|| missing("out"))?;
        let workers = match self.workers {
            Some(w) => w,
            None => file_value(&file, "workers", |v| parse_usize(v))?.unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, |p| p.get())
            }),
        };
        let min_df = match self.min_df {
            Some(m) => m,
            None => file_value(&file, "min_df", |v| parse_usize(v))?.unwrap_or(2),
        };
        let rate = match self.rate {
            Some(r) => Some(r),
            None => file_value(&file, "rate", |v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Invalid(format!("not a rate: {v:?}")))
            })?,
        };
        let end_model = self
            .end_model
            .or_else(|| file.get("end_model").cloned())
            .unwrap_or_else(|| "logreg".to_owned());
        let knn_k = match self.knn_k {
            Some(k) => k,
            None => file_value(&file, "knn_k", |v| parse_usize(v))?.unwrap_or(10),
        };

        if !dataset.exists() {
            return Err(Error::Invalid(format!(
                "dataset not found: {}",
                dataset.display()
            )));
        }
        if folds < 2 {
            return Err(Error::Invalid("need at least 2 folds".into()));
        }
        Ok(RunConfig {
            dataset,
            format,
            method,
            methods,
            params,
            folds,
            seed,
            out,
            workers,
            min_df,
            rate,
            end_model,
            knn_k,
        })
    }
}

fn provenance(config: &RunConfig, command: &str) -> serde_json::Value {
    json!({
        "tool": "prunekit",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": config.seed,
        "workers": config.workers,
        "config": config,
    })
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn stopwords() -> Result<Stopwords> {
    match std::env::var_os(STOPWORDS_ENV) {
        Some(path) => Stopwords::from_file(Path::new(&path)),
        None => Ok(Stopwords::default_english()),
    }
}

fn prepare_out(config: &RunConfig) -> Result<()> {
    fs::create_dir_all(&config.out).map_err(|source| Error::Io {
        path: config.out.display().to_string(),
        source,
    })
}

fn load(config: &RunConfig) -> Result<LabeledCorpus> {
    load_corpus(&config.dataset, config.format)
}

fn cmd_ingest(config: &RunConfig) -> Result<()> {
    prepare_out(config)?;
    let corpus = load(config)?;
    let stopwords = stopwords()?;
    let vocab = build_vocabulary(&corpus, &stopwords, config.min_df)?;
    let (matrix, zero_rows) = vectorize_tfidf(&corpus, &vocab);
    vocab.save_json(&config.out.join("vocabulary.json"))?;
    save_matrix(&matrix, &config.out.join("matrix.bin"))?;

    let counts = matrix.class_counts();
    let total_nnz: usize = matrix.rows.iter().map(|r| r.nnz()).sum();
    let majority = counts.iter().copied().max().unwrap_or(0);
    let minority = counts.iter().copied().filter(|&c| c > 0).min().unwrap_or(0);
    let stats = json!({
        "provenance": provenance(config, "ingest"),
        "stats": {
            "size": corpus.len(),
            "dimensionality": vocab.len(),
            "n_classes": corpus.n_classes(),
            // mean distinct retained terms per document
            "density": total_nnz as f64 / corpus.len() as f64,
            // majority-to-minority class size ratio
            "skewness": if minority > 0 { majority as f64 / minority as f64 } else { f64::INFINITY },
            "class_counts": counts,
            "empty_documents": zero_rows,
        },
    });
    write_json(&config.out.join("stats.json"), &stats)
}

fn cmd_select(config: &RunConfig) -> Result<()> {
    let method = config.method.as_deref().ok_or_else(|| missing("method"))?;
    prepare_out(config)?;
    let corpus = load(config)?;
    let stopwords = stopwords()?;
    let vocab = build_vocabulary(&corpus, &stopwords, config.min_df)?;
    let (matrix, _) = vectorize_tfidf(&corpus, &vocab);

    // The two-step methods also expose their evidence; run them directly so
    // the plan/breakdown lands in the artifact.
    let (result, evidence) = match method {
        "e2sc" => {
            let mut c = e2sc_config_from_params(&config.params)?;
            c.seed = config.seed;
            let (result, plan) = e2sc_select(&matrix, &c)?;
            (result, Some(("plan", serde_json::to_value(plan).unwrap())))
        }
        "bio-is" => {
            let mut c = bio_config_from_params(&config.params)?;
            c.seed = config.seed;
            let (result, breakdown) = bio_is_select(&matrix, &c)?;
            (
                result,
                Some(("breakdown", serde_json::to_value(breakdown).unwrap())),
            )
        }
        _ => {
            let selector = build_selector(method, &config.params)?;
            (selector.select(&matrix, config.seed)?, None)
        }
    };

    let mut artifact = json!({
        "provenance": provenance(config, "select"),
        "selection": result,
    });
    if let Some((key, value)) = evidence {
        artifact[key] = value;
    }
    write_json(&config.out.join("selection.json"), &artifact)
}

fn end_model(config: &RunConfig) -> Result<EndModel> {
    match config.end_model.as_str() {
        "logreg" => Ok(EndModel::LogReg(LogRegParams::default())),
        "knn" => Ok(EndModel::Knn { k: config.knn_k }),
        other => Err(Error::Invalid(format!(
            "unknown end model {other:?}: expected logreg or knn"
        ))),
    }
}

fn selectors_for(config: &RunConfig) -> Result<Vec<Box<dyn crate::eval::Selector>>> {
    if config.methods.is_empty() {
        return Err(missing("methods"));
    }
    // In multi-method commands params are scoped as `method.key=value`.
    let mut per_method: BTreeMap<&str, BTreeMap<String, String>> = BTreeMap::new();
    for (key, value) in &config.params {
        let (method, param) = key.split_once('.').ok_or_else(|| Error::InvalidParam {
            key: key.clone(),
            value: value.clone(),
            reason: "multi-method commands need method.key=value".into(),
        })?;
        per_method
            .entry(
                METHOD_NAMES
                    .iter()
                    .find(|&&m| m == method)
                    .ok_or_else(|| Error::UnknownMethod(method.to_owned()))?,
            )
            .or_default()
            .insert(param.to_owned(), value.clone());
    }
    let empty = BTreeMap::new();
    config
        .methods
        .iter()
        .map(|name| {
            build_selector(name, per_method.get(name.as_str()).unwrap_or(&empty))
        })
        .collect()
}

fn cmd_benchmark(config: &RunConfig) -> Result<()> {
    prepare_out(config)?;
    let corpus = load(config)?;
    let stopwords = stopwords()?;
    let methods = selectors_for(config)?;
    let plan = stratified_kfold(&corpus.labels, config.folds, config.seed)?;
    let end_model = end_model(config)?;
    let bench = BenchmarkConfig {
        min_df: config.min_df,
        seed: config.seed,
        significance_level: 0.05,
    };
    let reports = run_benchmark(&corpus, &methods, &plan, &end_model, &stopwords, &bench)?;
    let artifact = json!({
        "provenance": provenance(config, "benchmark"),
        "reports": reports,
    });
    write_json(&config.out.join("report.json"), &artifact)?;
    write_text(&config.out.join("report.csv"), &reports_to_csv(&reports))
}

fn cmd_noise_sim(config: &RunConfig) -> Result<()> {
    let rate = config.rate.ok_or_else(|| missing("rate"))?;
    prepare_out(config)?;
    let corpus = load(config)?;
    let stopwords = stopwords()?;
    let methods = selectors_for(config)?;
    let (noisy_labels, mask) =
        inject_label_noise(&corpus.labels, corpus.n_classes(), rate, config.seed)?;
    let noisy = LabeledCorpus {
        documents: corpus.documents.clone(),
        labels: noisy_labels,
        class_names: corpus.class_names.clone(),
    };
    let vocab = build_vocabulary(&noisy, &stopwords, config.min_df)?;
    let (matrix, _) = vectorize_tfidf(&noisy, &vocab);
    let reports: Vec<_> = methods
        .iter()
        .map(|m| {
            let result = m.select(&matrix, config.seed)?;
            Ok(noise_removal_report(&mask, rate, &result))
        })
        .collect::<Result<_>>()?;
    let artifact = json!({
        "provenance": provenance(config, "noise-sim"),
        "reports": reports,
    });
    write_json(&config.out.join("noise_sim.json"), &artifact)
}

fn usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::UnknownMethod(_) | Error::InvalidParam { .. } | Error::Invalid(_)
    )
}

fn dispatch(command: Command) -> Result<()> {
    let (config, run): (RunConfig, fn(&RunConfig) -> Result<()>) = match command {
        Command::Ingest(args) => (args.resolve()?, cmd_ingest),
        Command::Select(args) => (args.resolve()?, cmd_select),
        Command::Benchmark(args) => (args.resolve()?, cmd_benchmark),
        Command::NoiseSim(args) => (args.resolve()?, cmd_noise_sim),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    pool.install(|| run(&config))
}

/// Parse and run; returns the process exit code (0 ok, 1 runtime, 2 usage).
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::UnknownMethod(_) = e {
                eprintln!("available methods: {}", METHOD_NAMES.join(", "));
            }
            if usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}
