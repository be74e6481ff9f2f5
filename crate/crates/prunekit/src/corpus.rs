//! Corpus ingestion: labeled documents, vocabulary construction, sparse
//! L2-normalized TF-IDF vectorization and stratified fold plans.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bundled English stopword list; override with `Stopwords::from_file`.
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// A labeled text corpus with dense doc ids 0..N-1 and class ids 0..C-1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledCorpus {
    pub documents: Vec<String>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl LabeledCorpus {
    pub fn new(documents: Vec<String>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if documents.len() != labels.len() {
            return Err(Error::LengthMismatch(documents.len(), labels.len()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::Invalid(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            documents,
            labels,
            class_names,
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }
}

/// Lowercase tokenization split on any non-alphanumeric codepoint.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Stopword set applied during vocabulary construction.
#[derive(Debug, Clone, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn default_english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn none() -> Self {
        Self(HashSet::new())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::parse(&text))
    }

    fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_owned)
                .collect(),
        )
    }

    pub fn contains(&self, term: &str) -> bool {
        self.0.contains(term)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Term dictionary with document frequencies. Feature ids are assigned in
/// lexicographic term order, so construction is deterministic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    index: BTreeMap<String, usize>,
    pub n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn feature_id(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, feature: usize) -> &str {
        &self.terms[feature]
    }

    pub fn doc_freq(&self, feature: usize) -> usize {
        self.doc_freq[feature]
    }

    /// idf(t) = ln(N / df(t)) + 1.
    pub fn idf(&self, feature: usize) -> f64 {
        (self.n_docs as f64 / self.doc_freq[feature] as f64).ln() + 1.0
    }

    /// JSON dump as a list of {term, id, df} records.
    pub fn save_json(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct Entry<'a> {
            term: &'a str,
            id: usize,
            df: usize,
        }
        let entries: Vec<Entry> = self
            .terms
            .iter()
            .enumerate()
            .map(|(id, term)| Entry {
                term,
                id,
                df: self.doc_freq[id],
            })
            .collect();
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::to_writer_pretty(BufWriter::new(file), &entries).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e.into(),
        })
    }
}

/// Count stopword-filtered document frequencies and keep terms with
/// df >= min_df. Errors if nothing survives.
pub fn build_vocabulary(
    corpus: &LabeledCorpus,
    stopwords: &Stopwords,
    min_df: usize,
) -> Result<Vocabulary> {
    assert!(min_df >= 1, "min_df must be >= 1");
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in &corpus.documents {
        let mut seen: HashSet<String> = HashSet::new();
        for token in tokenize(doc) {
            if !stopwords.contains(&token) {
                seen.insert(token);
            }
        }
        for token in seen {
            *df.entry(token).or_insert(0) += 1;
        }
    }
    let mut terms = Vec::new();
    let mut doc_freq = Vec::new();
    let mut index = BTreeMap::new();
    for (term, freq) in df {
        if freq >= min_df {
            index.insert(term.clone(), terms.len());
            terms.push(term);
            doc_freq.push(freq);
        }
    }
    if terms.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Ok(Vocabulary {
        terms,
        doc_freq,
        index,
        n_docs: corpus.len(),
    })
}

/// Sparse vector: strictly ascending indices, no explicit zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseVector {
    pub fn empty() -> Self {
        Self {
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Dot product by merging the two ascending index lists.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let mut sum = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }
}

/// Sparse TF-IDF matrix plus labels; the shared training-set representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusMatrix {
    pub rows: Vec<SparseVector>,
    pub labels: Vec<usize>,
    pub n_features: usize,
    pub n_classes: usize,
}

impl CorpusMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Rows extracted by id, preserving the given order. Labels follow.
    pub fn subset(&self, ids: &[usize]) -> CorpusMatrix {
        CorpusMatrix {
            rows: ids.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: ids.iter().map(|&i| self.labels[i]).collect(),
            n_features: self.n_features,
            n_classes: self.n_classes,
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

/// TF-IDF with tf = raw count and idf = ln(N/df)+1, rows L2-normalized.
/// Documents with no in-vocabulary term become all-zero rows and are
/// reported back so callers can warn.
pub fn vectorize_tfidf(corpus: &LabeledCorpus, vocab: &Vocabulary) -> (CorpusMatrix, Vec<usize>) {
    let mut rows = Vec::with_capacity(corpus.len());
    let mut zero_rows = Vec::new();
    for (doc_id, doc) in corpus.documents.iter().enumerate() {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for token in tokenize(doc) {
            if let Some(f) = vocab.feature_id(&token) {
                *counts.entry(f).or_insert(0.0) += 1.0;
            }
        }
        let mut indices = Vec::with_capacity(counts.len());
        let mut values = Vec::with_capacity(counts.len());
        for (f, tf) in counts {
            indices.push(f as u32);
            values.push(tf * vocab.idf(f));
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut values {
                *v /= norm;
            }
        } else {
            zero_rows.push(doc_id);
        }
        rows.push(SparseVector { indices, values });
    }
    (
        CorpusMatrix {
            rows,
            labels: corpus.labels.clone(),
            n_features: vocab.len(),
            n_classes: corpus.n_classes(),
        },
        zero_rows,
    )
}

/// Stratified fold assignment: per-class counts across folds differ by at
/// most one, deterministic for a fixed seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn fold_ids(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn complement_ids(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }
}

pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<FoldPlan> {
    assert!(k >= 2, "k must be >= 2");
    let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    for (class, members) in by_class.iter().enumerate() {
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                class,
                count: members.len(),
                k,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for (pos, &id) in members.iter().enumerate() {
            assignment[id] = pos % k;
        }
    }
    Ok(FoldPlan {
        k,
        assignment,
        seed,
    })
}

// ---------------------------------------------------------------------------
// Dataset loading
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Tsv,
    Jsonl,
}

impl std::str::FromStr for DatasetFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(Self::Tsv),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(Error::Invalid(format!("unknown dataset format {other:?}"))),
        }
    }
}

/// Load a TSV ("label<TAB>text") or JSONL ({"label": ..., "text": ...})
/// dataset. Class ids follow first appearance order.
pub fn load_corpus(path: &Path, format: DatasetFormat) -> Result<LabeledCorpus> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = std::io::BufReader::new(file);
    let mut documents = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut class_index: BTreeMap<String, usize> = BTreeMap::new();
    let path_str = path.display().to_string();

    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path_str.clone(),
            source,
        })?;
        if line.is_empty() {
            continue;
        }
        let (label, text) = match format {
            DatasetFormat::Tsv => {
                let (label, text) = line.split_once('\t').ok_or_else(|| Error::Parse {
                    path: path_str.clone(),
                    line: line_no + 1,
                    reason: "expected \"label<TAB>text\"".into(),
                })?;
                (label.to_owned(), text.to_owned())
            }
            DatasetFormat::Jsonl => {
                let value: serde_json::Value =
                    serde_json::from_str(&line).map_err(|e| Error::Parse {
                        path: path_str.clone(),
                        line: line_no + 1,
                        reason: e.to_string(),
                    })?;
                let label = value
                    .get("label")
                    .and_then(|v| match v {
                        serde_json::Value::String(s) => Some(s.clone()),
                        serde_json::Value::Number(n) => Some(n.to_string()),
                        _ => None,
                    })
                    .ok_or_else(|| Error::Parse {
                        path: path_str.clone(),
                        line: line_no + 1,
                        reason: "missing \"label\" key".into(),
                    })?;
                let text = value
                    .get("text")
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| Error::Parse {
                        path: path_str.clone(),
                        line: line_no + 1,
                        reason: "missing \"text\" key".into(),
                    })?
                    .to_owned();
                (label, text)
            }
        };
        let class_id = match class_index.get(&label) {
            Some(&id) => id,
            None => {
                let id = class_names.len();
                class_index.insert(label.clone(), id);
                class_names.push(label);
                id
            }
        };
        documents.push(text);
        labels.push(class_id);
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    LabeledCorpus::new(documents, labels, class_names)
}

/// Write a corpus back out as TSV.
pub fn save_corpus_tsv(corpus: &LabeledCorpus, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    for (doc, &label) in corpus.documents.iter().zip(&corpus.labels) {
        writeln!(w, "{}\t{}", corpus.class_names[label], doc).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Binary matrix persistence
// ---------------------------------------------------------------------------
//
// Layout (little-endian):
//   magic   5 bytes  "PKIT1"
//   n_rows      u64
//   n_features  u64
//   n_classes   u64
//   labels      n_rows * u32
//   rows        per row: nnz u32, then nnz * u32 indices, then nnz * f64 values

const MATRIX_MAGIC: &[u8; 5] = b"PKIT1";

pub fn save_matrix(matrix: &CorpusMatrix, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let mut write = |bytes: &[u8]| w.write_all(bytes).map_err(io_err);
    write(MATRIX_MAGIC)?;
    write(&(matrix.n_rows() as u64).to_le_bytes())?;
    write(&(matrix.n_features as u64).to_le_bytes())?;
    write(&(matrix.n_classes as u64).to_le_bytes())?;
    for &label in &matrix.labels {
        write(&(label as u32).to_le_bytes())?;
    }
    for row in &matrix.rows {
        write(&(row.nnz() as u32).to_le_bytes())?;
        for &idx in &row.indices {
            write(&idx.to_le_bytes())?;
        }
        for &val in &row.values {
            write(&val.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn load_matrix(path: &Path) -> Result<CorpusMatrix> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let bad = |reason: &str| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        reason: reason.into(),
    };
    let file = std::fs::File::open(path).map_err(io_err)?;
    let mut r = std::io::BufReader::new(file);

    let mut magic = [0u8; 5];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MATRIX_MAGIC {
        return Err(bad("bad magic, not a PKIT1 matrix file"));
    }
    let mut u64buf = [0u8; 8];
    let mut read_u64 = |r: &mut std::io::BufReader<std::fs::File>| -> Result<u64> {
        r.read_exact(&mut u64buf).map_err(io_err)?;
        Ok(u64::from_le_bytes(u64buf))
    };
    let n_rows = read_u64(&mut r)? as usize;
    let n_features = read_u64(&mut r)? as usize;
    let n_classes = read_u64(&mut r)? as usize;

    let read_u32 = |r: &mut std::io::BufReader<std::fs::File>| -> Result<u32> {
        let mut buf = [0u8; 4];
        r.read_exact(&mut buf).map_err(io_err)?;
        Ok(u32::from_le_bytes(buf))
    };
    let read_f64 = |r: &mut std::io::BufReader<std::fs::File>| -> Result<f64> {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf).map_err(io_err)?;
        Ok(f64::from_le_bytes(buf))
    };

    let mut labels = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        labels.push(read_u32(&mut r)? as usize);
    }
    let mut rows = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let nnz = read_u32(&mut r)? as usize;
        let mut indices = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            indices.push(read_u32(&mut r)?);
        }
        let mut values = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            values.push(read_f64(&mut r)?);
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("row indices not strictly ascending"));
        }
        if indices.iter().any(|&i| i as usize >= n_features) {
            return Err(bad("feature index out of range"));
        }
        rows.push(SparseVector { indices, values });
    }
    Ok(CorpusMatrix {
        rows,
        labels,
        n_features,
        n_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_corpus() -> LabeledCorpus {
        LabeledCorpus::new(
            vec![
                "alpha beta gamma".into(),
                "alpha beta".into(),
                "delta delta gamma".into(),
            ],
            vec![0, 0, 1],
            vec!["pos".into(), "neg".into()],
        )
        .unwrap()
    }

    #[test]
    fn tokenize_rules() {
        assert_eq!(tokenize("The CNN rule!"), vec!["the", "cnn", "rule"]);
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("a1-b2"), vec!["a1", "b2"]);
    }

    #[test]
    fn vocabulary_min_df_and_stopwords() {
        let corpus = LabeledCorpus::new(
            vec![
                "the alpha unique1".into(),
                "the alpha common".into(),
                "the common".into(),
            ],
            vec![0, 0, 1],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let vocab = build_vocabulary(&corpus, &Stopwords::default_english(), 2).unwrap();
        // "unique1" df=1 excluded; "the" is a stopword in every doc, excluded.
        assert!(vocab.feature_id("unique1").is_none());
        assert!(vocab.feature_id("the").is_none());
        assert_eq!(vocab.doc_freq(vocab.feature_id("alpha").unwrap()), 2);
        assert_eq!(vocab.doc_freq(vocab.feature_id("common").unwrap()), 2);
    }

    #[test]
    fn vocabulary_empty_errors() {
        let corpus = LabeledCorpus::new(
            vec!["x1".into(), "x2".into()],
            vec![0, 1],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert!(matches!(
            build_vocabulary(&corpus, &Stopwords::none(), 2),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn tfidf_rows_are_unit_norm_and_match_hand_computation() {
        let corpus = toy_corpus();
        let vocab = build_vocabulary(&corpus, &Stopwords::none(), 1).unwrap();
        let (matrix, zero_rows) = vectorize_tfidf(&corpus, &vocab);
        assert!(zero_rows.is_empty());
        for row in &matrix.rows {
            assert!((row.norm() - 1.0).abs() < 1e-9);
        }
        // Hand-computed dense oracle for doc 2 = "delta delta gamma".
        // N=3; df: alpha=2, beta=2, delta=1, gamma=2.
        let n = 3.0f64;
        let idf_delta = (n / 1.0).ln() + 1.0;
        let idf_gamma = (n / 2.0).ln() + 1.0;
        let raw = [2.0 * idf_delta, 1.0 * idf_gamma];
        let norm = (raw[0] * raw[0] + raw[1] * raw[1]).sqrt();
        let row = &matrix.rows[2];
        let delta_id = vocab.feature_id("delta").unwrap() as u32;
        let gamma_id = vocab.feature_id("gamma").unwrap() as u32;
        assert_eq!(row.indices, vec![delta_id.min(gamma_id), delta_id.max(gamma_id)]);
        let val = |id: u32| row.iter().find(|&(i, _)| i == id).unwrap().1;
        assert!((val(delta_id) - raw[0] / norm).abs() < 1e-12);
        assert!((val(gamma_id) - raw[1] / norm).abs() < 1e-12);
    }

    #[test]
    fn idf_of_ubiquitous_term_is_one() {
        let corpus = toy_corpus();
        let vocab = build_vocabulary(&corpus, &Stopwords::none(), 1).unwrap();
        // gamma appears in docs 0 and 2 out of 3 — take a term in all docs instead.
        let corpus_all = LabeledCorpus::new(
            vec!["zz a".into(), "zz b".into(), "zz c".into()],
            vec![0, 0, 1],
            vec!["x".into(), "y".into()],
        )
        .unwrap();
        let vocab_all = build_vocabulary(&corpus_all, &Stopwords::none(), 1).unwrap();
        let zz = vocab_all.feature_id("zz").unwrap();
        assert!((vocab_all.idf(zz) - 1.0).abs() < 1e-12);
        drop(vocab);
    }

    #[test]
    fn zero_row_recorded_for_out_of_vocab_doc() {
        let corpus = toy_corpus();
        let vocab = build_vocabulary(&corpus, &Stopwords::none(), 1).unwrap();
        let extra = LabeledCorpus::new(
            vec!["zzz qqq".into()],
            vec![0],
            vec!["pos".into()],
        )
        .unwrap();
        let (matrix, zero_rows) = vectorize_tfidf(&extra, &vocab);
        assert_eq!(zero_rows, vec![0]);
        assert_eq!(matrix.rows[0].nnz(), 0);
    }

    #[test]
    fn stratified_fold_balance() {
        let labels: Vec<usize> = (0..100).map(|i| i % 2).collect();
        let plan = stratified_kfold(&labels, 10, 42).unwrap();
        for fold in 0..10 {
            let ids = plan.fold_ids(fold);
            assert_eq!(ids.len(), 10);
            let pos = ids.iter().filter(|&&i| labels[i] == 0).count();
            assert_eq!(pos, 5);
        }
    }

    #[test]
    fn stratified_fold_uneven_class() {
        let labels = vec![0usize; 21];
        let plan = stratified_kfold(&labels, 10, 7).unwrap();
        let mut counts = vec![0usize; 10];
        for &f in &plan.assignment {
            counts[f] += 1;
        }
        assert!(counts.iter().all(|&c| c == 2 || c == 3));
    }

    #[test]
    fn stratified_fold_deterministic_and_errors() {
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let a = stratified_kfold(&labels, 5, 9).unwrap();
        let b = stratified_kfold(&labels, 5, 9).unwrap();
        assert_eq!(a.assignment, b.assignment);
        assert!(matches!(
            stratified_kfold(&[0, 0, 0, 1], 3, 0),
            Err(Error::ClassTooSmall { class: 1, .. })
        ));
    }

    #[test]
    fn tsv_and_jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let tsv = dir.path().join("toy.tsv");
        std::fs::write(&tsv, "pos\tgreat movie\nneg\tterrible plot\n").unwrap();
        let corpus = load_corpus(&tsv, DatasetFormat::Tsv).unwrap();
        assert_eq!(corpus.n_classes(), 2);
        assert_eq!(corpus.len(), 2);

        let back = dir.path().join("back.tsv");
        save_corpus_tsv(&corpus, &back).unwrap();
        let again = load_corpus(&back, DatasetFormat::Tsv).unwrap();
        assert_eq!(again.documents, corpus.documents);
        assert_eq!(again.labels, corpus.labels);

        let jsonl = dir.path().join("bad.jsonl");
        std::fs::write(&jsonl, "{\"label\": \"pos\"}\n").unwrap();
        match load_corpus(&jsonl, DatasetFormat::Jsonl) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn matrix_binary_round_trip() {
        let corpus = toy_corpus();
        let vocab = build_vocabulary(&corpus, &Stopwords::none(), 1).unwrap();
        let (matrix, _) = vectorize_tfidf(&corpus, &vocab);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pkit");
        save_matrix(&matrix, &path).unwrap();
        let loaded = load_matrix(&path).unwrap();
        assert_eq!(loaded.labels, matrix.labels);
        assert_eq!(loaded.n_features, matrix.n_features);
        assert_eq!(loaded.rows, matrix.rows);
    }
}
