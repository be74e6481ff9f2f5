//! Exact sparse-cosine KNN: nearest-neighbor search, similarity-weighted
//! posteriors, and leave-one-out predictions.

use prunekit::corpus::{build_vocabulary, vectorize_tfidf, Stopwords};
use prunekit::neighbors::KnnModel;
use prunekit::synth::{synth_corpus, SynthConfig};

fn main() -> prunekit::Result<()> {
    let corpus = synth_corpus(&SynthConfig {
        n_docs: 300,
        n_classes: 3,
        overlap: 0.3,
        seed: 21,
        ..SynthConfig::default()
    });
    let vocab = build_vocabulary(&corpus, &Stopwords::none(), 2)?;
    let (matrix, _) = vectorize_tfidf(&corpus, &vocab);

    let model = KnnModel::new(&matrix, 5);
    let neighbors = model.search(&matrix.rows[0], Some(0))?;
    println!("5 nearest neighbors of doc 0 (label {}):", matrix.labels[0]);
    for (id, sim) in neighbors.ids.iter().zip(&neighbors.similarities) {
        println!("  doc {id:>3}  label {}  cosine {sim:.4}", matrix.labels[*id]);
    }

    let records = model.loo_predictions()?;
    let correct = records.iter().filter(|r| r.correct).count();
    println!(
        "leave-one-out accuracy: {:.3} ({} / {})",
        correct as f64 / records.len() as f64,
        correct,
        records.len()
    );
    let r = &records[0];
    println!(
        "doc 0 posterior {:?} predicted {} entropy {:.4}",
        r.posterior
            .iter()
            .map(|p| (p * 1000.0).round() / 1000.0)
            .collect::<Vec<_>>(),
        r.predicted,
        r.entropy
    );
    Ok(())
}
