//! Bi-objective selection on a corpus with injected label noise: the noise
//! arm removes confidently-misclassified instances, then the redundancy arm
//! prunes the denoised set.

use prunekit::bio::{bio_is_select, BioConfig};
use prunekit::corpus::{build_vocabulary, vectorize_tfidf, LabeledCorpus, Stopwords};
use prunekit::eval::inject_label_noise;
use prunekit::synth::{synth_corpus, SynthConfig};

fn main() -> prunekit::Result<()> {
    let clean = synth_corpus(&SynthConfig {
        n_docs: 500,
        n_classes: 4,
        overlap: 0.15,
        seed: 3,
        ..SynthConfig::default()
    });
    let (noisy_labels, mask) = inject_label_noise(&clean.labels, clean.n_classes(), 0.1, 42)?;
    let corpus = LabeledCorpus {
        documents: clean.documents.clone(),
        labels: noisy_labels,
        class_names: clean.class_names.clone(),
    };
    let injected = mask.iter().filter(|&&m| m).count();
    println!("injected label noise: {injected} of {} documents", corpus.len());

    let vocab = build_vocabulary(&corpus, &Stopwords::none(), 2)?;
    let (matrix, _) = vectorize_tfidf(&corpus, &vocab);

    let config = BioConfig {
        noise_beta_step: 0.1,
        redundancy_beta_step: 0.1,
        redundancy_beta_max: 0.6,
        repetitions: 3,
        seed: 42,
        ..BioConfig::default()
    };
    let (result, breakdown) = bio_is_select(&matrix, &config)?;

    let noise_hits = breakdown
        .removed_as_noise
        .iter()
        .filter(|&&i| mask[i])
        .count();
    println!(
        "noise arm: beta {:.2}, removed {} ({} actually injected -> recall {:.2})",
        breakdown.beta_noise,
        breakdown.removed_as_noise.len(),
        noise_hits,
        noise_hits as f64 / injected as f64
    );
    println!(
        "redundancy arm: beta {:.2}, removed {}",
        breakdown.beta_redundancy,
        breakdown.removed_as_redundant.len()
    );
    println!(
        "total: {} removed of {} ({:.1}% reduction) in {:.2}s",
        result.removed.len(),
        matrix.n_rows(),
        100.0 * result.reduction(),
        result.time_seconds
    );
    Ok(())
}
