//! Corpus ingestion end to end: tokenize, build a vocabulary, vectorize to
//! L2-normalized TF-IDF, and round-trip the matrix through the binary format.

use prunekit::corpus::{
    build_vocabulary, load_matrix, save_matrix, vectorize_tfidf, Stopwords,
};
use prunekit::synth::{synth_corpus, SynthConfig};

fn main() -> prunekit::Result<()> {
    let corpus = synth_corpus(&SynthConfig {
        n_docs: 200,
        n_classes: 4,
        overlap: 0.25,
        seed: 7,
        ..SynthConfig::default()
    });
    println!("documents: {}  classes: {}", corpus.len(), corpus.n_classes());

    let vocab = build_vocabulary(&corpus, &Stopwords::default_english(), 2)?;
    println!("vocabulary terms (df >= 2): {}", vocab.len());
    let term = vocab.term(0);
    println!(
        "first term {:?}: df={} idf={:.4}",
        term,
        vocab.doc_freq(0),
        vocab.idf(0)
    );

    let (matrix, empty) = vectorize_tfidf(&corpus, &vocab);
    let nnz: usize = matrix.rows.iter().map(|r| r.nnz()).sum();
    println!(
        "matrix: {} x {}  mean nnz/doc {:.1}  empty docs {}",
        matrix.n_rows(),
        matrix.n_features,
        nnz as f64 / matrix.n_rows() as f64,
        empty.len()
    );
    // Every row is unit length.
    for row in &matrix.rows {
        assert!((row.norm() - 1.0).abs() < 1e-9);
    }

    let dir = std::env::temp_dir().join("prunekit_tfidf_example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("matrix.bin");
    save_matrix(&matrix, &path)?;
    let restored = load_matrix(&path)?;
    assert_eq!(restored.n_rows(), matrix.n_rows());
    assert_eq!(restored.labels, matrix.labels);
    println!("binary round-trip ok: {}", path.display());
    Ok(())
}
