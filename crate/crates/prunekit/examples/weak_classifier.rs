//! The calibrated weak classifier: multinomial logistic regression,
//! out-of-fold posteriors, and a reliability/ECE report.

use prunekit::corpus::{build_vocabulary, vectorize_tfidf, Stopwords};
use prunekit::synth::{synth_corpus, SynthConfig};
use prunekit::weak::{calibration_report, cross_predict, train_logreg, LogRegParams};

fn main() -> prunekit::Result<()> {
    let corpus = synth_corpus(&SynthConfig {
        n_docs: 400,
        n_classes: 4,
        overlap: 0.35,
        seed: 13,
        ..SynthConfig::default()
    });
    let vocab = build_vocabulary(&corpus, &Stopwords::none(), 2)?;
    let (matrix, _) = vectorize_tfidf(&corpus, &vocab);

    let params = LogRegParams {
        l2_strength: 0.01,
        ..LogRegParams::default()
    };
    let model = train_logreg(&matrix, &params)?;
    println!(
        "trained in {} iterations, final objective {:.4}",
        model.iterations, model.final_objective
    );
    let in_sample = matrix
        .rows
        .iter()
        .zip(&matrix.labels)
        .filter(|(r, &l)| model.predict(r) == l)
        .count();
    println!(
        "in-sample accuracy {:.3}",
        in_sample as f64 / matrix.n_rows() as f64
    );

    // Out-of-fold posteriors are the honest confidence estimates.
    let records = cross_predict(&matrix, 5, 42, &params)?;
    let oof = records.iter().filter(|r| r.correct).count();
    println!(
        "out-of-fold accuracy {:.3}",
        oof as f64 / records.len() as f64
    );

    let report = calibration_report(&records, 10);
    println!("expected calibration error {:.4}", report.ece);
    for b in 0..report.bin_counts.len() {
        if report.bin_counts[b] > 0 {
            println!(
                "  bin [{:.1},{:.1})  n={:<4} mean conf {:.3}  accuracy {:.3}",
                report.bin_edges[b],
                report.bin_edges[b + 1],
                report.bin_counts[b],
                report.bin_mean_confidence[b],
                report.bin_accuracy[b]
            );
        }
    }
    Ok(())
}
