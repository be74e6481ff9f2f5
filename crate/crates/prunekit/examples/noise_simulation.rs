//! How much injected label noise does each method actually remove? The
//! noise-oriented editors should score high recall; pure condensation
//! methods should not.

use std::collections::BTreeMap;

use prunekit::corpus::{build_vocabulary, vectorize_tfidf, LabeledCorpus, Stopwords};
use prunekit::eval::{inject_label_noise, noise_removal_report};
use prunekit::methods::build_selector;
use prunekit::synth::{synth_corpus, SynthConfig};

fn main() -> prunekit::Result<()> {
    let clean = synth_corpus(&SynthConfig {
        n_docs: 500,
        n_classes: 4,
        overlap: 0.15,
        seed: 9,
        ..SynthConfig::default()
    });
    let rate = 0.1;
    let (noisy_labels, mask) = inject_label_noise(&clean.labels, clean.n_classes(), rate, 42)?;
    let corpus = LabeledCorpus {
        documents: clean.documents.clone(),
        labels: noisy_labels,
        class_names: clean.class_names.clone(),
    };
    let vocab = build_vocabulary(&corpus, &Stopwords::none(), 2)?;
    let (matrix, _) = vectorize_tfidf(&corpus, &vocab);

    println!(
        "{:<8} {:>8} {:>12} {:>14}",
        "method", "removed", "noise recall", "clean removed"
    );
    for name in ["enn", "drop3", "cnn", "lsbo", "e2sc", "bio-is"] {
        let selector = build_selector(name, &BTreeMap::new())?;
        let result = selector.select(&matrix, 42)?;
        let report = noise_removal_report(&mask, rate, &result);
        println!(
            "{:<8} {:>8} {:>11.1}% {:>13.1}%",
            report.method,
            report.removed_total,
            100.0 * report.noise_recall,
            100.0 * report.clean_removal_rate
        );
    }
    Ok(())
}
