//! Confidence-based redundancy removal in two steps: a removal-weight
//! distribution from calibrated leave-one-out KNN confidence (the alpha
//! step), a near-optimal reduction rate found by iterative statistical
//! comparison on a held-out validation slice (the beta step), then an
//! alpha-weighted sample of removals.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::corpus::CorpusMatrix;
use crate::error::{Error, Result};
use crate::eval::{macro_f1, paired_ttest, Verdict};
use crate::neighbors::KnnModel;
use crate::posterior::PosteriorRecord;
use crate::sampling::weighted_sample_without_replacement;
use crate::selection::{ensure_class_coverage, SelectionResult};
use crate::weak::{train_logreg, LogRegParams};

/// Per-instance removal weights. Instances the weak model got wrong carry
/// weight exactly zero; the rest normalize to one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaScores {
    pub weights: Vec<f64>,
    pub candidates: Vec<bool>,
}

impl AlphaScores {
    pub fn n_candidates(&self) -> usize {
        self.candidates.iter().filter(|&&c| c).count()
    }
}

/// weight(i) = posterior_i(true label) when the weak model is correct on i,
/// else 0, normalized over the candidate set.
pub fn compute_alpha(records: &[PosteriorRecord]) -> Result<AlphaScores> {
    let mut weights = vec![0.0f64; records.len()];
    let mut candidates = vec![false; records.len()];
    let mut total = 0.0;
    for r in records {
        if r.correct {
            // predicted == true label here, so this is the true-label confidence.
            weights[r.id] = r.max_confidence();
            candidates[r.id] = true;
            total += weights[r.id];
        }
    }
    if total <= 0.0 {
        return Err(Error::NoRemovableInstances);
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok(AlphaScores {
        weights,
        candidates,
    })
}

/// Proxy learner used inside the beta scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ProxyLearner {
    Knn { k: usize },
    LogReg(LogRegParams),
}

impl ProxyLearner {
    pub fn fit_predict(
        &self,
        train: &CorpusMatrix,
        queries: &[crate::corpus::SparseVector],
    ) -> Result<Vec<usize>> {
        match self {
            ProxyLearner::Knn { k } => {
                let k = (*k).min(train.n_rows().saturating_sub(1)).max(1);
                KnnModel::new(train, k).predict(queries)
            }
            ProxyLearner::LogReg(params) => {
                let model = train_logreg(train, params)?;
                Ok(queries.iter().map(|q| model.predict(q)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetaTraceEntry {
    pub rate: f64,
    pub mean_effectiveness: f64,
    pub baseline_mean: f64,
    pub p_value: f64,
    pub significantly_worse: bool,
}

/// The chosen reduction rate and the audit trail of the scan that chose it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub beta: f64,
    pub trace: Vec<BetaTraceEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct E2scConfig {
    pub k: usize,
    pub beta_step: f64,
    pub beta_max: f64,
    pub repetitions: usize,
    pub significance_level: f64,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for E2scConfig {
    fn default() -> Self {
        Self {
            k: 10,
            beta_step: 0.05,
            beta_max: 0.95,
            repetitions: 5,
            significance_level: 0.05,
            validation_fraction: 0.1,
            seed: 42,
        }
    }
}

impl E2scConfig {
    fn validate(&self) -> Result<()> {
        if !(self.beta_step > 0.0 && self.beta_step < 1.0) {
            return Err(Error::Invalid(format!("beta step {} outside (0,1)", self.beta_step)));
        }
        if self.repetitions < 2 {
            return Err(Error::Invalid("need at least 2 repetitions".into()));
        }
        if !(self.significance_level > 0.0 && self.significance_level < 1.0) {
            return Err(Error::Invalid("significance level outside (0,1)".into()));
        }
        Ok(())
    }
}

/// Stratified train/validation split over 0..n. Every class keeps at least
/// one member on each side.
fn validation_split(
    labels: &[usize],
    n_classes: usize,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut val = Vec::new();
    for (class, mut members) in by_class.into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::DegenerateValidation(class));
        }
        members.shuffle(&mut rng);
        let take = ((members.len() as f64 * fraction).round() as usize)
            .max(1)
            .min(members.len() - 1);
        val.extend_from_slice(&members[..take]);
        train.extend_from_slice(&members[take..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    Ok((train, val))
}

fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(a.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(b.wrapping_mul(0x94D0_49BB_1331_11EB))
}

/// What a candidate rate is a fraction of: the whole training side of the
/// split, or just the positive-weight candidates in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateBase {
    TrainingSet,
    Candidates,
}

/// Ascending scan over candidate reduction rates. For each rate, removal
/// weights drive r sampled reductions of the training side of r paired
/// validation splits; a paired t-test against the unreduced baseline stops
/// the scan at the first significantly worse rate.
pub fn estimate_beta(
    matrix: &CorpusMatrix,
    weights: &[f64],
    proxy: &ProxyLearner,
    config: &E2scConfig,
) -> Result<BetaEstimate> {
    estimate_beta_with_base(matrix, weights, proxy, config, RateBase::TrainingSet)
}

pub fn estimate_beta_with_base(
    matrix: &CorpusMatrix,
    weights: &[f64],
    proxy: &ProxyLearner,
    config: &E2scConfig,
    rate_base: RateBase,
) -> Result<BetaEstimate> {
    config.validate()?;
    let universe = matrix.n_classes;
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..config.repetitions)
        .map(|rep| {
            validation_split(
                &matrix.labels,
                universe,
                config.validation_fraction,
                derive_seed(config.seed, 1, rep as u64),
            )
        })
        .collect::<Result<_>>()?;

    let baseline: Vec<f64> = splits
        .par_iter()
        .map(|(train_ids, val_ids)| {
            let train = matrix.subset(train_ids);
            let val = matrix.subset(val_ids);
            let pred = proxy.fit_predict(&train, &val.rows)?;
            macro_f1(&val.labels, &pred, universe)
        })
        .collect::<Result<_>>()?;

    let mut beta = 0.0;
    let mut trace = Vec::new();
    let mut rate_index = 0u64;
    let mut rate = config.beta_step;
    while rate <= config.beta_max + 1e-12 {
        let scores: Vec<f64> = splits
            .par_iter()
            .enumerate()
            .map(|(rep, (train_ids, val_ids))| {
                // Weights restricted to this split's training side.
                let local_weights: Vec<f64> =
                    train_ids.iter().map(|&i| weights[i]).collect();
                let positive = local_weights.iter().filter(|&&w| w > 0.0).count();
                let base = match rate_base {
                    RateBase::TrainingSet => train_ids.len(),
                    RateBase::Candidates => positive,
                };
                let m = ((rate * base as f64).floor() as usize).min(positive);
                let removed = weighted_sample_without_replacement(
                    &local_weights,
                    m,
                    derive_seed(config.seed, 2 + rate_index, rep as u64),
                )?;
                let train = matrix.subset(train_ids);
                let mut keep = vec![true; train.n_rows()];
                for pos in removed {
                    keep[pos] = false;
                }
                // Guard: never hand the proxy a class-free training set. The
                // repair runs before subsetting so removed members are still
                // visible to it.
                ensure_class_coverage(&train, &mut keep);
                let kept: Vec<usize> = (0..keep.len()).filter(|&i| keep[i]).collect();
                let reduced = train.subset(&kept);
                let val = matrix.subset(val_ids);
                let pred = proxy.fit_predict(&reduced, &val.rows)?;
                macro_f1(&val.labels, &pred, universe)
            })
            .collect::<Result<_>>()?;

        let ttest = paired_ttest(&scores, &baseline, config.significance_level)?;
        let worse = ttest.verdict == Verdict::Loss;
        trace.push(BetaTraceEntry {
            rate,
            mean_effectiveness: scores.iter().sum::<f64>() / scores.len() as f64,
            baseline_mean: baseline.iter().sum::<f64>() / baseline.len() as f64,
            p_value: ttest.p,
            significantly_worse: worse,
        });
        if worse {
            break;
        }
        beta = rate;
        rate_index += 1;
        rate = config.beta_step * (rate_index + 1) as f64;
    }
    Ok(BetaEstimate { beta, trace })
}

/// The alpha/beta evidence behind a selection run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionPlan {
    pub alpha: AlphaScores,
    pub beta: BetaEstimate,
}

/// Full E2SC run: leave-one-out KNN posteriors, alpha weights, beta scan,
/// then an alpha-weighted sample of floor(beta * n) removals.
pub fn e2sc_select(
    matrix: &CorpusMatrix,
    config: &E2scConfig,
) -> Result<(SelectionResult, SelectionPlan)> {
    config.validate()?;
    let start = Instant::now();
    let n = matrix.n_rows();
    let k = config.k.min(n.saturating_sub(1)).max(1);
    let model = KnnModel::new(matrix, k);
    let records = model.loo_predictions()?;

    let params = json!({
        "k": config.k,
        "beta_step": config.beta_step,
        "beta_max": config.beta_max,
        "repetitions": config.repetitions,
        "significance_level": config.significance_level,
        "validation_fraction": config.validation_fraction,
        "seed": config.seed,
    });

    let alpha = match compute_alpha(&records) {
        Ok(alpha) => alpha,
        Err(Error::NoRemovableInstances) => {
            // Everything is hard: degrade to the identity selection.
            let keep = vec![true; n];
            let result = SelectionResult::from_mask(
                "e2sc",
                params,
                &keep,
                start.elapsed().as_secs_f64(),
            );
            let plan = SelectionPlan {
                alpha: AlphaScores {
                    weights: vec![0.0; n],
                    candidates: vec![false; n],
                },
                beta: BetaEstimate {
                    beta: 0.0,
                    trace: Vec::new(),
                },
            };
            return Ok((result, plan));
        }
        Err(e) => return Err(e),
    };

    let proxy = ProxyLearner::Knn { k: config.k };
    let beta = if config.beta_max <= 0.0 {
        BetaEstimate {
            beta: 0.0,
            trace: Vec::new(),
        }
    } else {
        estimate_beta(matrix, &alpha.weights, &proxy, config)?
    };

    let m = ((beta.beta * n as f64).floor() as usize).min(alpha.n_candidates());
    let removed =
        weighted_sample_without_replacement(&alpha.weights, m, derive_seed(config.seed, 0, 0))?;
    let mut keep = vec![true; n];
    for &i in &removed {
        keep[i] = false;
    }
    ensure_class_coverage(matrix, &mut keep);
    let result = SelectionResult::from_mask("e2sc", params, &keep, start.elapsed().as_secs_f64());
    Ok((result, SelectionPlan { alpha, beta }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SparseVector;

    fn record(id: usize, posterior: Vec<f64>, true_label: usize) -> PosteriorRecord {
        PosteriorRecord::new(id, posterior, true_label)
    }

    #[test]
    fn alpha_uniform_when_all_equal() {
        let records: Vec<PosteriorRecord> =
            (0..4).map(|i| record(i, vec![0.8, 0.2], 0)).collect();
        let alpha = compute_alpha(&records).unwrap();
        for &w in &alpha.weights {
            assert!((w - 0.25).abs() < 1e-12);
        }
        let total: f64 = alpha.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn alpha_misclassified_weight_zero() {
        let records = vec![
            record(0, vec![0.9, 0.1], 0),
            record(1, vec![0.9, 0.1], 1), // wrong
        ];
        let alpha = compute_alpha(&records).unwrap();
        assert_eq!(alpha.weights[1], 0.0);
        assert!(!alpha.candidates[1]);
        assert!((alpha.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_all_wrong_errors() {
        let records = vec![record(0, vec![0.9, 0.1], 1), record(1, vec![0.2, 0.8], 0)];
        assert!(matches!(
            compute_alpha(&records),
            Err(Error::NoRemovableInstances)
        ));
    }

    #[test]
    fn alpha_duplicates_outweigh_boundary_points() {
        // Weighted-vote construction: duplicates predicted with confidence
        // 1.0, a boundary point with 0.4.
        let records = vec![
            record(0, vec![1.0, 0.0], 0),
            record(1, vec![1.0, 0.0], 0),
            record(2, vec![0.6, 0.4], 0),
        ];
        let alpha = compute_alpha(&records).unwrap();
        assert!(alpha.weights[0] > alpha.weights[2]);
        assert!(alpha.weights[1] > alpha.weights[2]);
    }

    /// C distinct unit vectors duplicated `dup` times each.
    fn duplicated_prototypes(c: usize, dup: usize) -> CorpusMatrix {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for class in 0..c {
            for _ in 0..dup {
                rows.push(SparseVector {
                    indices: vec![class as u32],
                    values: vec![1.0],
                });
                labels.push(class);
            }
        }
        CorpusMatrix {
            rows,
            labels,
            n_features: c,
            n_classes: c,
        }
    }

    #[test]
    fn beta_high_on_pure_duplicates() {
        let matrix = duplicated_prototypes(3, 50);
        let model = KnnModel::new(&matrix, 5);
        let records = model.loo_predictions().unwrap();
        let alpha = compute_alpha(&records).unwrap();
        let config = E2scConfig {
            k: 5,
            beta_step: 0.1,
            beta_max: 0.9,
            repetitions: 3,
            seed: 5,
            ..E2scConfig::default()
        };
        let beta = estimate_beta(
            &matrix,
            &alpha.weights,
            &ProxyLearner::Knn { k: 5 },
            &config,
        )
        .unwrap();
        assert!(beta.beta >= 0.5, "beta = {}", beta.beta);
    }

    #[test]
    fn beta_trace_is_ascending_with_single_terminal_failure() {
        let matrix = duplicated_prototypes(2, 20);
        let model = KnnModel::new(&matrix, 3);
        let records = model.loo_predictions().unwrap();
        let alpha = compute_alpha(&records).unwrap();
        let config = E2scConfig {
            k: 3,
            beta_step: 0.2,
            beta_max: 0.8,
            repetitions: 2,
            seed: 1,
            ..E2scConfig::default()
        };
        let beta = estimate_beta(
            &matrix,
            &alpha.weights,
            &ProxyLearner::Knn { k: 3 },
            &config,
        )
        .unwrap();
        let rates: Vec<f64> = beta.trace.iter().map(|t| t.rate).collect();
        for w in rates.windows(2) {
            assert!(w[1] > w[0]);
        }
        let failures = beta.trace.iter().filter(|t| t.significantly_worse).count();
        assert!(failures <= 1);
        if failures == 1 {
            assert!(beta.trace.last().unwrap().significantly_worse);
        }
    }

    #[test]
    fn select_with_zero_beta_max_is_identity() {
        let matrix = duplicated_prototypes(2, 10);
        let config = E2scConfig {
            k: 3,
            beta_max: 0.0,
            repetitions: 2,
            seed: 9,
            ..E2scConfig::default()
        };
        let (result, plan) = e2sc_select(&matrix, &config).unwrap();
        assert_eq!(result.retained.len(), matrix.n_rows());
        assert_eq!(plan.beta.beta, 0.0);
    }

    #[test]
    fn select_reduction_matches_beta_arithmetic() {
        let matrix = duplicated_prototypes(3, 30);
        let config = E2scConfig {
            k: 5,
            beta_step: 0.1,
            beta_max: 0.5,
            repetitions: 2,
            seed: 13,
            ..E2scConfig::default()
        };
        let (result, plan) = e2sc_select(&matrix, &config).unwrap();
        let n = matrix.n_rows();
        let expected = ((plan.beta.beta * n as f64).floor() as usize)
            .min(plan.alpha.n_candidates());
        // The class guard can only shrink the removal set.
        assert!(result.removed.len() <= expected);
        assert!(result.removed.len() + 3 >= expected);
        // Determinism.
        let (result2, _) = e2sc_select(&matrix, &config).unwrap();
        assert_eq!(result.retained, result2.retained);
    }

    #[test]
    fn validation_split_errors_on_singleton_class() {
        let labels = vec![0, 0, 0, 1];
        assert!(matches!(
            validation_split(&labels, 2, 0.25, 0),
            Err(Error::DegenerateValidation(1))
        ));
    }
}
