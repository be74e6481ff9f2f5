//! The full evaluation protocol: stratified folds, per-fold vocabulary fit,
//! selection, end-model training with and without selection, and paired
//! t-tests with Bonferroni correction.

use std::collections::BTreeMap;

use prunekit::corpus::{stratified_kfold, Stopwords};
use prunekit::eval::{run_benchmark, BenchmarkConfig, EndModel, Selector};
use prunekit::methods::build_selector;
use prunekit::synth::{synth_corpus, SynthConfig};
use prunekit::weak::LogRegParams;

fn main() -> prunekit::Result<()> {
    let corpus = synth_corpus(&SynthConfig {
        n_docs: 600,
        n_classes: 4,
        overlap: 0.3,
        seed: 17,
        ..SynthConfig::default()
    });
    let methods: Vec<Box<dyn Selector>> = ["identity", "enn", "cnn", "e2sc"]
        .iter()
        .map(|name| build_selector(name, &BTreeMap::new()))
        .collect::<prunekit::Result<_>>()?;
    let plan = stratified_kfold(&corpus.labels, 5, 42)?;
    let end_model = EndModel::LogReg(LogRegParams {
        l2_strength: 0.01,
        ..LogRegParams::default()
    });
    let config = BenchmarkConfig::default();

    let reports = run_benchmark(
        &corpus,
        &methods,
        &plan,
        &end_model,
        &Stopwords::none(),
        &config,
    )?;

    println!(
        "{:<10} {:>9} {:>8} {:>10} {:>10} {:>8}  verdict",
        "method", "reduction", "speedup", "F1 with", "F1 base", "p"
    );
    for r in &reports {
        println!(
            "{:<10} {:>8.1}% {:>7.2}x {:>10.4} {:>10.4} {:>8.4}  {:?}",
            r.method,
            100.0 * r.reduction_mean,
            r.speedup,
            r.macro_f1_with_mean,
            r.macro_f1_without_mean,
            r.p_value,
            r.verdict
        );
    }
    Ok(())
}
