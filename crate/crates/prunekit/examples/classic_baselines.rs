//! The classical instance-selection baselines side by side: reduction rate
//! and selection time on one synthetic corpus.

use prunekit::classic::{
    cnn_select, drop3_select, egdis_select, enn_select, ib3_select, lsbo_select, lssm_select,
};
use prunekit::corpus::{build_vocabulary, vectorize_tfidf, Stopwords};
use prunekit::selection::SelectionResult;
use prunekit::synth::{synth_corpus, SynthConfig};

fn main() -> prunekit::Result<()> {
    let corpus = synth_corpus(&SynthConfig {
        n_docs: 400,
        n_classes: 4,
        overlap: 0.35,
        seed: 5,
        ..SynthConfig::default()
    });
    let vocab = build_vocabulary(&corpus, &Stopwords::none(), 2)?;
    let (matrix, _) = vectorize_tfidf(&corpus, &vocab);

    let results: Vec<SelectionResult> = vec![
        enn_select(&matrix, 3),
        cnn_select(&matrix, 42),
        drop3_select(&matrix, 3),
        lssm_select(&matrix),
        lsbo_select(&matrix),
        egdis_select(&matrix, 10),
        ib3_select(&matrix, 0.90, 0.70, 42),
    ];

    println!("{:<8} {:>9} {:>11} {:>9}", "method", "retained", "reduction", "time");
    for r in &results {
        println!(
            "{:<8} {:>9} {:>10.1}% {:>8.3}s",
            r.method,
            r.retained.len(),
            100.0 * r.reduction(),
            r.time_seconds
        );
        // Shared invariants: full partition, every class covered.
        assert_eq!(r.retained.len() + r.removed.len(), matrix.n_rows());
        let counts = matrix.subset(&r.retained).class_counts();
        assert!(counts.iter().all(|&c| c > 0));
    }
    Ok(())
}
