//! Seeded synthetic corpora and sparse matrices for fixtures, examples and
//! end-to-end runs. Class overlap is tunable: each token is drawn either
//! from a class-specific vocabulary or from a pool shared by all classes.

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CorpusMatrix, LabeledCorpus, SparseVector};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_docs: usize,
    pub n_classes: usize,
    /// Distinct terms private to each class.
    pub class_vocab: usize,
    /// Distinct terms shared by every class.
    pub shared_vocab: usize,
    pub words_per_doc: usize,
    /// Probability that a token comes from the shared pool. 0 gives
    /// perfectly separable classes; near 1 gives heavy overlap.
    pub overlap: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_docs: 500,
            n_classes: 4,
            class_vocab: 60,
            shared_vocab: 120,
            words_per_doc: 30,
            overlap: 0.3,
            seed: 42,
        }
    }
}

/// Deterministic labeled text corpus. Labels are dealt round-robin so class
/// sizes differ by at most one.
pub fn synth_corpus(config: &SynthConfig) -> LabeledCorpus {
    assert!(config.n_classes >= 1 && config.n_docs >= config.n_classes);
    assert!(config.class_vocab >= 1 && config.words_per_doc >= 1);
    assert!((0.0..=1.0).contains(&config.overlap));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let class_term = Uniform::from(0..config.class_vocab);
    let shared_term = if config.shared_vocab > 0 {
        Some(Uniform::from(0..config.shared_vocab))
    } else {
        None
    };
    let mut documents = Vec::with_capacity(config.n_docs);
    let mut labels = Vec::with_capacity(config.n_docs);
    for doc in 0..config.n_docs {
        let class = doc % config.n_classes;
        let mut words = Vec::with_capacity(config.words_per_doc);
        for _ in 0..config.words_per_doc {
            let shared = match shared_term {
                Some(dist) if rng.gen_bool(config.overlap) => Some(dist.sample(&mut rng)),
                _ => None,
            };
            match shared {
                Some(t) => words.push(format!("common{t}")),
                None => words.push(format!("topic{class}word{}", class_term.sample(&mut rng))),
            }
        }
        documents.push(words.join(" "));
        labels.push(class);
    }
    let class_names = (0..config.n_classes).map(|c| format!("class{c}")).collect();
    LabeledCorpus::new(documents, labels, class_names).expect("non-empty by construction")
}

/// Random L2-normalized sparse matrix with labels, for oracle comparisons.
pub fn random_sparse_matrix(
    n_rows: usize,
    n_features: usize,
    max_nnz: usize,
    n_classes: usize,
    seed: u64,
) -> CorpusMatrix {
    assert!(n_rows >= n_classes && n_classes >= 1);
    assert!(max_nnz >= 1 && n_features >= max_nnz);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n_rows);
    let mut labels = Vec::with_capacity(n_rows);
    for row in 0..n_rows {
        let nnz = rng.gen_range(1..=max_nnz);
        let mut indices: Vec<u32> = Vec::with_capacity(nnz);
        while indices.len() < nnz {
            let f = rng.gen_range(0..n_features) as u32;
            if !indices.contains(&f) {
                indices.push(f);
            }
        }
        indices.sort_unstable();
        let mut values: Vec<f64> = (0..nnz).map(|_| rng.gen_range(0.05..1.0)).collect();
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut values {
            *v /= norm;
        }
        rows.push(SparseVector { indices, values });
        // Round-robin guarantees every class is populated.
        labels.push(row % n_classes);
    }
    CorpusMatrix {
        rows,
        labels,
        n_features,
        n_classes,
    }
}
