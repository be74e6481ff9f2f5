//! Confidence-based redundancy removal: alpha weights from leave-one-out
//! KNN confidence, the beta rate scan with its statistical audit trail, and
//! the final weighted sample.

use prunekit::corpus::{build_vocabulary, vectorize_tfidf, Stopwords};
use prunekit::e2sc::{e2sc_select, E2scConfig};
use prunekit::synth::{synth_corpus, SynthConfig};

fn main() -> prunekit::Result<()> {
    // Redundancy-heavy corpus: many near-duplicate documents per class.
    let corpus = synth_corpus(&SynthConfig {
        n_docs: 600,
        n_classes: 4,
        class_vocab: 25,
        words_per_doc: 20,
        overlap: 0.2,
        seed: 11,
        ..SynthConfig::default()
    });
    let vocab = build_vocabulary(&corpus, &Stopwords::none(), 2)?;
    let (matrix, _) = vectorize_tfidf(&corpus, &vocab);

    let config = E2scConfig {
        k: 10,
        beta_step: 0.1,
        beta_max: 0.9,
        repetitions: 3,
        seed: 42,
        ..E2scConfig::default()
    };
    let (result, plan) = e2sc_select(&matrix, &config)?;

    println!(
        "alpha candidates: {} / {} instances carry removal weight",
        plan.alpha.n_candidates(),
        matrix.n_rows()
    );
    println!("beta scan:");
    for entry in &plan.beta.trace {
        println!(
            "  rate {:.2}  effectiveness {:.4} (baseline {:.4})  p={:.4}{}",
            entry.rate,
            entry.mean_effectiveness,
            entry.baseline_mean,
            entry.p_value,
            if entry.significantly_worse {
                "  <- significantly worse, stop"
            } else {
                ""
            }
        );
    }
    println!(
        "chosen beta {:.2}  removed {} of {}  ({:.1}% reduction) in {:.2}s",
        plan.beta.beta,
        result.removed.len(),
        matrix.n_rows(),
        100.0 * result.reduction(),
        result.time_seconds
    );
    Ok(())
}
