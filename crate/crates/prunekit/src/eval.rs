//! Evaluation protocol: MacroF1, reduction and speedup metrics, paired
//! t-tests with Bonferroni correction, label-noise injection, and the
//! fold-wise benchmark harness.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    build_vocabulary, vectorize_tfidf, CorpusMatrix, FoldPlan, LabeledCorpus, Stopwords,
};
use crate::error::{Error, Result};
use crate::neighbors::KnnModel;
use crate::selection::SelectionResult;
use crate::stats::student_t_two_sided_p;
use crate::weak::{train_logreg, LogRegParams};

/// Macro-averaged F1 over an explicit label universe 0..n_classes. A class
/// absent from both y_true and y_pred contributes F1 = 0.
pub fn macro_f1(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch(y_true.len(), y_pred.len()));
    }
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fn_ = vec![0usize; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }
    let mut sum = 0.0;
    for c in 0..n_classes {
        let denom = 2 * tp[c] + fp[c] + fn_[c];
        if denom > 0 {
            sum += 2.0 * tp[c] as f64 / denom as f64;
        }
    }
    Ok(sum / n_classes as f64)
}

/// Mean over folds of (|T_i| - |S_i|) / |T_i|.
pub fn reduction_mean(fold_pairs: &[(usize, usize)]) -> Result<f64> {
    if fold_pairs.is_empty() {
        return Err(Error::Invalid("reduction_mean over empty input".into()));
    }
    let mut sum = 0.0;
    for &(t, s) in fold_pairs {
        if t == 0 || s > t {
            return Err(Error::Invalid(format!("invalid fold pair ({t}, {s})")));
        }
        sum += (t - s) as f64 / t as f64;
    }
    Ok(sum / fold_pairs.len() as f64)
}

/// S = T_without / T_with.
pub fn speedup(t_without: f64, t_with: f64) -> Result<f64> {
    if t_without <= 0.0 {
        return Err(Error::NonPositiveTime(t_without));
    }
    if t_with <= 0.0 {
        return Err(Error::NonPositiveTime(t_with));
    }
    Ok(t_without / t_with)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Win,
    Tie,
    Loss,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TTestOutcome {
    pub t: f64,
    pub p: f64,
    pub verdict: Verdict,
}

/// Two-sided paired t-test of a against b. Verdict is from a's point of
/// view: win when a is significantly larger. Zero-variance differences are
/// a tie when the mean is zero and a decisive win/loss otherwise.
pub fn paired_ttest(a: &[f64], b: &[f64], level: f64) -> Result<TTestOutcome> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::Invalid("paired t-test needs at least 2 pairs".into()));
    }
    let n = a.len() as f64;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return Ok(if mean == 0.0 {
            TTestOutcome {
                t: 0.0,
                p: 1.0,
                verdict: Verdict::Tie,
            }
        } else {
            TTestOutcome {
                t: if mean > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
                p: 0.0,
                verdict: if mean > 0.0 { Verdict::Win } else { Verdict::Loss },
            }
        });
    }
    let t = mean / (var / n).sqrt();
    let p = student_t_two_sided_p(t, n - 1.0);
    let verdict = if p >= level {
        Verdict::Tie
    } else if mean > 0.0 {
        Verdict::Win
    } else {
        Verdict::Loss
    };
    Ok(TTestOutcome { t, p, verdict })
}

/// Bonferroni correction: reject hypothesis i iff p_i < level / m.
pub fn bonferroni(p_values: &[f64], level: f64) -> Vec<bool> {
    let m = p_values.len().max(1) as f64;
    p_values.iter().map(|&p| p < level / m).collect()
}

/// Flip floor(rate * n) uniformly chosen labels to a uniformly chosen
/// different class. Returns the noisy labels and the flipped-id mask.
pub fn inject_label_noise(
    labels: &[usize],
    n_classes: usize,
    rate: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<bool>)> {
    if !(0.0..1.0).contains(&rate) || rate <= 0.0 {
        return Err(Error::NoiseRateOutOfRange(rate));
    }
    if n_classes < 2 {
        return Err(Error::SingleClass(n_classes));
    }
    let n = labels.len();
    let m = (rate * n as f64).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    ids.truncate(m);
    let mut noisy = labels.to_vec();
    let mut mask = vec![false; n];
    for &i in &ids {
        let mut new_label = rng.gen_range(0..n_classes - 1);
        if new_label >= labels[i] {
            new_label += 1;
        }
        noisy[i] = new_label;
        mask[i] = true;
    }
    Ok((noisy, mask))
}

/// How well a selection run removed injected noise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseSimReport {
    pub method: String,
    pub injection_rate: f64,
    pub injected: usize,
    pub removed_total: usize,
    pub noise_recall: f64,
    pub clean_removal_rate: f64,
}

pub fn noise_removal_report(
    mask: &[bool],
    rate: f64,
    result: &SelectionResult,
) -> NoiseSimReport {
    let injected = mask.iter().filter(|&&m| m).count();
    let removed_noise = result.removed.iter().filter(|&&i| mask[i]).count();
    let removed_clean = result.removed.len() - removed_noise;
    let clean_total = mask.len() - injected;
    NoiseSimReport {
        method: result.method.clone(),
        injection_rate: rate,
        injected,
        removed_total: result.removed.len(),
        noise_recall: if injected > 0 {
            removed_noise as f64 / injected as f64
        } else {
            0.0
        },
        clean_removal_rate: if clean_total > 0 {
            removed_clean as f64 / clean_total as f64
        } else {
            0.0
        },
    }
}

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

/// Downstream classifier trained on the (possibly reduced) training fold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum EndModel {
    Knn { k: usize },
    LogReg(LogRegParams),
}

impl EndModel {
    /// Train and predict; returns predictions and the training wall time.
    pub fn fit_predict(
        &self,
        train: &CorpusMatrix,
        test_rows: &[crate::corpus::SparseVector],
    ) -> Result<(Vec<usize>, f64)> {
        match self {
            EndModel::Knn { k } => {
                let k = (*k).min(train.n_rows().saturating_sub(1)).max(1);
                let start = Instant::now();
                let model = KnnModel::new(train, k);
                let train_time = start.elapsed().as_secs_f64();
                Ok((model.predict(test_rows)?, train_time))
            }
            EndModel::LogReg(params) => {
                let start = Instant::now();
                let model = train_logreg(train, params)?;
                let train_time = start.elapsed().as_secs_f64();
                Ok((
                    test_rows.iter().map(|r| model.predict(r)).collect(),
                    train_time,
                ))
            }
        }
    }
}

/// A named selection method usable by the harness and the CLI registry.
pub trait Selector: Sync + Send {
    fn name(&self) -> &str;
    fn select(&self, matrix: &CorpusMatrix, seed: u64) -> Result<SelectionResult>;
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold: usize,
    pub n_train: usize,
    pub n_selected: usize,
    pub macro_f1_with: f64,
    pub macro_f1_without: f64,
    pub selection_seconds: f64,
    pub train_seconds_with: f64,
    pub train_seconds_without: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub folds: Vec<FoldOutcome>,
    pub reduction_mean: f64,
    pub t_with: f64,
    pub t_without: f64,
    pub speedup: f64,
    pub macro_f1_with_mean: f64,
    pub macro_f1_without_mean: f64,
    pub p_value: f64,
    pub verdict: Verdict,
    pub bonferroni_significant: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub min_df: usize,
    pub seed: u64,
    pub significance_level: f64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            min_df: 2,
            seed: 42,
            significance_level: 0.05,
        }
    }
}

fn corpus_slice(corpus: &LabeledCorpus, ids: &[usize]) -> LabeledCorpus {
    LabeledCorpus {
        documents: ids.iter().map(|&i| corpus.documents[i].clone()).collect(),
        labels: ids.iter().map(|&i| corpus.labels[i]).collect(),
        class_names: corpus.class_names.clone(),
    }
}

/// Fold-wise benchmark: the vocabulary is fit on the training partition
/// only, selection runs on the training matrix, and the end model is
/// trained with and without selection and scored on the held-out fold.
pub fn run_benchmark(
    corpus: &LabeledCorpus,
    methods: &[Box<dyn Selector>],
    plan: &FoldPlan,
    end_model: &EndModel,
    stopwords: &Stopwords,
    config: &BenchmarkConfig,
) -> Result<Vec<EvalReport>> {
    struct FoldData {
        baseline_train_seconds: f64,
        per_method: Vec<FoldOutcome>,
    }

    let fold_results: Vec<Result<FoldData>> = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let train_ids = plan.complement_ids(fold);
            let test_ids = plan.fold_ids(fold);
            let train_corpus = corpus_slice(corpus, &train_ids);
            let test_corpus = corpus_slice(corpus, &test_ids);
            let vocab = build_vocabulary(&train_corpus, stopwords, config.min_df)?;
            // Leakage audit: the vocabulary must be explainable by the
            // training partition alone.
            debug_assert_eq!(vocab.n_docs, train_ids.len());
            let (train_matrix, _) = vectorize_tfidf(&train_corpus, &vocab);
            let (test_matrix, _) = vectorize_tfidf(&test_corpus, &vocab);
            let universe = corpus.n_classes();

            let (baseline_pred, baseline_train_seconds) =
                end_model.fit_predict(&train_matrix, &test_matrix.rows)?;
            let baseline_f1 = macro_f1(&test_matrix.labels, &baseline_pred, universe)?;

            let mut per_method = Vec::with_capacity(methods.len());
            for method in methods {
                let selection =
                    method.select(&train_matrix, config.seed.wrapping_add(fold as u64))?;
                let reduced = train_matrix.subset(&selection.retained);
                let (pred, train_seconds_with) =
                    end_model.fit_predict(&reduced, &test_matrix.rows)?;
                let f1_with = macro_f1(&test_matrix.labels, &pred, universe)?;
                per_method.push(FoldOutcome {
                    fold,
                    n_train: train_ids.len(),
                    n_selected: selection.retained.len(),
                    macro_f1_with: f1_with,
                    macro_f1_without: baseline_f1,
                    selection_seconds: selection.time_seconds,
                    train_seconds_with,
                    train_seconds_without: baseline_train_seconds,
                });
            }
            Ok(FoldData {
                baseline_train_seconds,
                per_method,
            })
        })
        .collect();

    let mut folds = Vec::with_capacity(plan.k);
    for f in fold_results {
        folds.push(f?);
    }

    let mut reports = Vec::with_capacity(methods.len());
    let mut p_values = Vec::with_capacity(methods.len());
    for (mi, method) in methods.iter().enumerate() {
        let outcomes: Vec<FoldOutcome> =
            folds.iter().map(|f| f.per_method[mi].clone()).collect();
        let with: Vec<f64> = outcomes.iter().map(|o| o.macro_f1_with).collect();
        let without: Vec<f64> = outcomes.iter().map(|o| o.macro_f1_without).collect();
        let ttest = paired_ttest(&with, &without, config.significance_level)?;
        let pairs: Vec<(usize, usize)> =
            outcomes.iter().map(|o| (o.n_train, o.n_selected)).collect();
        let t_with: f64 = outcomes
            .iter()
            .map(|o| o.selection_seconds + o.train_seconds_with)
            .sum();
        let t_without: f64 = folds.iter().map(|f| f.baseline_train_seconds).sum();
        p_values.push(ttest.p);
        reports.push(EvalReport {
            method: method.name().to_owned(),
            reduction_mean: reduction_mean(&pairs)?,
            t_with,
            t_without,
            speedup: speedup(t_without.max(f64::MIN_POSITIVE), t_with.max(f64::MIN_POSITIVE))?,
            macro_f1_with_mean: with.iter().sum::<f64>() / with.len() as f64,
            macro_f1_without_mean: without.iter().sum::<f64>() / without.len() as f64,
            p_value: ttest.p,
            verdict: ttest.verdict,
            bonferroni_significant: false,
            folds: outcomes,
        });
    }
    let significant = bonferroni(&p_values, config.significance_level);
    for (report, sig) in reports.iter_mut().zip(significant) {
        report.bonferroni_significant = sig;
        if !sig {
            // A comparison that does not survive the correction is a tie.
            report.verdict = Verdict::Tie;
        }
    }
    Ok(reports)
}

/// Flat CSV export: one row per method x fold.
pub fn reports_to_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from(
        "method,fold,n_train,n_selected,macro_f1_with,macro_f1_without,selection_seconds,train_seconds_with,train_seconds_without\n",
    );
    for report in reports {
        for o in &report.folds {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                report.method,
                o.fold,
                o.n_train,
                o.n_selected,
                o.macro_f1_with,
                o.macro_f1_without,
                o.selection_seconds,
                o.train_seconds_with,
                o.train_seconds_without
            ));
        }
    }
    out
}
