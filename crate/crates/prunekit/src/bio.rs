//! Bi-objective selection: a noise arm that removes misclassified
//! instances weighted by the entropy complement of their posterior, then a
//! redundancy arm over the denoised set reusing the alpha/beta machinery
//! with logistic regression as the calibrated weak classifier.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::corpus::CorpusMatrix;
use crate::e2sc::{
    compute_alpha, estimate_beta_with_base, BetaEstimate, E2scConfig, ProxyLearner, RateBase,
};
use crate::error::{Error, Result};
use crate::posterior::PosteriorRecord;
use crate::sampling::weighted_sample_without_replacement;
use crate::selection::{ensure_class_coverage, SelectionResult};
use crate::weak::{cross_predict, LogRegParams};

/// Per-instance noise-removal weights. Only misclassified instances are
/// candidates; a confidently wrong prediction (low entropy) weighs most,
/// a merely uncertain one (entropy near ln C) weighs least.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseScores {
    pub weights: Vec<f64>,
    pub candidates: Vec<bool>,
}

impl NoiseScores {
    pub fn n_candidates(&self) -> usize {
        self.candidates.iter().filter(|&&c| c).count()
    }
}

/// weight(i) = (ln C - H_i) / ln C for misclassified i, else 0, normalized
/// over the candidate set. An empty candidate set is a no-op, not an error.
pub fn compute_noise_scores(records: &[PosteriorRecord], n_classes: usize) -> NoiseScores {
    let h_max = (n_classes as f64).ln();
    let mut weights = vec![0.0f64; records.len()];
    let mut candidates = vec![false; records.len()];
    let mut total = 0.0;
    for r in records {
        if !r.correct {
            candidates[r.id] = true;
            let w = if h_max > 0.0 {
                ((h_max - r.entropy) / h_max).clamp(0.0, 1.0)
            } else {
                0.0
            };
            weights[r.id] = w;
            total += w;
        }
    }
    if total > 0.0 {
        for w in &mut weights {
            *w /= total;
        }
    }
    NoiseScores {
        weights,
        candidates,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BioConfig {
    pub logreg: LogRegParams,
    pub cross_folds: usize,
    pub noise_beta_step: f64,
    pub noise_beta_max: f64,
    pub redundancy_beta_step: f64,
    pub redundancy_beta_max: f64,
    pub repetitions: usize,
    pub significance_level: f64,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for BioConfig {
    fn default() -> Self {
        Self {
            // Weaker regularization than the general-purpose default: the
            // proxy must actually separate the classes for misclassification
            // to signal noise rather than underfit.
            logreg: LogRegParams {
                l2_strength: 0.01,
                ..LogRegParams::default()
            },
            cross_folds: 5,
            noise_beta_step: 0.05,
            noise_beta_max: 0.95,
            redundancy_beta_step: 0.05,
            redundancy_beta_max: 0.95,
            repetitions: 5,
            significance_level: 0.05,
            validation_fraction: 0.1,
            seed: 42,
        }
    }
}

impl BioConfig {
    fn arm_config(&self, step: f64, max: f64, seed_salt: u64) -> E2scConfig {
        E2scConfig {
            k: 1, // unused by the logistic-regression proxy
            beta_step: step,
            beta_max: max,
            repetitions: self.repetitions,
            significance_level: self.significance_level,
            validation_fraction: self.validation_fraction,
            seed: self.seed.wrapping_add(seed_salt),
        }
    }
}

/// Which arm removed what, and at which estimated rates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BioSelectionBreakdown {
    pub removed_as_noise: Vec<usize>,
    pub removed_as_redundant: Vec<usize>,
    pub beta_noise: f64,
    pub beta_redundancy: f64,
    pub noise_trace: Vec<crate::e2sc::BetaTraceEntry>,
    pub redundancy_trace: Vec<crate::e2sc::BetaTraceEntry>,
}

fn min_class_count(matrix: &CorpusMatrix) -> usize {
    matrix
        .class_counts()
        .into_iter()
        .filter(|&c| c > 0)
        .min()
        .unwrap_or(0)
}

fn oof_records(matrix: &CorpusMatrix, config: &BioConfig) -> Result<Vec<PosteriorRecord>> {
    let folds = config.cross_folds.min(min_class_count(matrix)).max(2);
    cross_predict(matrix, folds, config.seed, &config.logreg)
}

/// Noise arm: out-of-fold LR posteriors, entropy-complement weights over
/// the misclassified instances, then a beta scan whose rates are fractions
/// of the candidate pool. Returns the removed ids and the estimate.
fn run_noise_arm(
    matrix: &CorpusMatrix,
    records: &[PosteriorRecord],
    config: &BioConfig,
) -> Result<(Vec<usize>, BetaEstimate)> {
    let scores = compute_noise_scores(records, matrix.n_classes);
    let n_candidates = scores.n_candidates();
    if n_candidates == 0 || config.noise_beta_max <= 0.0 {
        return Ok((
            Vec::new(),
            BetaEstimate {
                beta: 0.0,
                trace: Vec::new(),
            },
        ));
    }
    let proxy = ProxyLearner::LogReg(config.logreg);
    let arm = config.arm_config(config.noise_beta_step, config.noise_beta_max, 0x6e6f);
    let estimate =
        estimate_beta_with_base(matrix, &scores.weights, &proxy, &arm, RateBase::Candidates)?;
    let m = ((estimate.beta * n_candidates as f64).floor() as usize).min(n_candidates);
    let removed = weighted_sample_without_replacement(&scores.weights, m, arm.seed)?;
    // Guard here, not just at the end: the redundancy arm must see every
    // class in the denoised set.
    let mut keep = vec![true; matrix.n_rows()];
    for &i in &removed {
        keep[i] = false;
    }
    ensure_class_coverage(matrix, &mut keep);
    let removed = (0..keep.len()).filter(|&i| !keep[i]).collect();
    Ok((removed, estimate))
}

/// Redundancy arm over the denoised set: fresh out-of-fold posteriors,
/// confidence-based alpha weights, beta scan over training-set fractions,
/// then an alpha-weighted sample. Ids returned in the original index space.
fn run_redundancy_arm(
    matrix: &CorpusMatrix,
    denoised_ids: &[usize],
    config: &BioConfig,
) -> Result<(Vec<usize>, BetaEstimate)> {
    let noop = BetaEstimate {
        beta: 0.0,
        trace: Vec::new(),
    };
    let denoised = matrix.subset(denoised_ids);
    if min_class_count(&denoised) < 2 || config.redundancy_beta_max <= 0.0 {
        return Ok((Vec::new(), noop));
    }
    let records = oof_records(&denoised, config)?;
    let alpha = match compute_alpha(&records) {
        Ok(alpha) => alpha,
        Err(Error::NoRemovableInstances) => return Ok((Vec::new(), noop)),
        Err(e) => return Err(e),
    };
    let proxy = ProxyLearner::LogReg(config.logreg);
    let arm = config.arm_config(
        config.redundancy_beta_step,
        config.redundancy_beta_max,
        0x7265,
    );
    let estimate =
        estimate_beta_with_base(&denoised, &alpha.weights, &proxy, &arm, RateBase::TrainingSet)?;
    let m = ((estimate.beta * denoised.n_rows() as f64).floor() as usize)
        .min(alpha.n_candidates());
    let removed_local = weighted_sample_without_replacement(&alpha.weights, m, arm.seed)?;
    let removed = removed_local.into_iter().map(|i| denoised_ids[i]).collect();
    Ok((removed, estimate))
}

fn finish(
    matrix: &CorpusMatrix,
    method: &str,
    params: serde_json::Value,
    removed_noise: Vec<usize>,
    noise_estimate: BetaEstimate,
    removed_redundant: Vec<usize>,
    redundancy_estimate: BetaEstimate,
    start: Instant,
) -> (SelectionResult, BioSelectionBreakdown) {
    let n = matrix.n_rows();
    let mut keep = vec![true; n];
    for &i in removed_noise.iter().chain(&removed_redundant) {
        keep[i] = false;
    }
    ensure_class_coverage(matrix, &mut keep);
    // The guard may re-add: intersect the per-arm lists with what actually
    // stayed removed.
    let final_removed: HashSet<usize> = (0..n).filter(|&i| !keep[i]).collect();
    let removed_as_noise: Vec<usize> = removed_noise
        .into_iter()
        .filter(|i| final_removed.contains(i))
        .collect();
    let removed_as_redundant: Vec<usize> = removed_redundant
        .into_iter()
        .filter(|i| final_removed.contains(i))
        .collect();
    let breakdown = BioSelectionBreakdown {
        removed_as_noise,
        removed_as_redundant,
        beta_noise: noise_estimate.beta,
        beta_redundancy: redundancy_estimate.beta,
        noise_trace: noise_estimate.trace,
        redundancy_trace: redundancy_estimate.trace,
    };
    let mut result =
        SelectionResult::from_mask(method, params, &keep, start.elapsed().as_secs_f64());
    result.annotations = Some(json!({
        "beta_noise": breakdown.beta_noise,
        "beta_redundancy": breakdown.beta_redundancy,
        "removed_as_noise": breakdown.removed_as_noise,
        "removed_as_redundant": breakdown.removed_as_redundant,
    }));
    (result, breakdown)
}

fn config_json(config: &BioConfig) -> serde_json::Value {
    serde_json::to_value(config).expect("config serializes")
}

/// Full biO-IS run: noise arm first, then the redundancy arm on the
/// denoised set.
pub fn bio_is_select(
    matrix: &CorpusMatrix,
    config: &BioConfig,
) -> Result<(SelectionResult, BioSelectionBreakdown)> {
    if matrix.n_classes < 2 {
        return Err(Error::SingleClass(matrix.n_classes));
    }
    let start = Instant::now();
    let records = oof_records(matrix, config)?;
    let (removed_noise, noise_estimate) = run_noise_arm(matrix, &records, config)?;
    let denoised_ids: Vec<usize> = {
        let removed: HashSet<usize> = removed_noise.iter().copied().collect();
        (0..matrix.n_rows()).filter(|i| !removed.contains(i)).collect()
    };
    let (removed_redundant, redundancy_estimate) =
        run_redundancy_arm(matrix, &denoised_ids, config)?;
    Ok(finish(
        matrix,
        "bio-is",
        config_json(config),
        removed_noise,
        noise_estimate,
        removed_redundant,
        redundancy_estimate,
        start,
    ))
}

/// Ablation switch: the noise arm alone.
pub fn noise_arm_only(
    matrix: &CorpusMatrix,
    config: &BioConfig,
) -> Result<(SelectionResult, BioSelectionBreakdown)> {
    if matrix.n_classes < 2 {
        return Err(Error::SingleClass(matrix.n_classes));
    }
    let start = Instant::now();
    let records = oof_records(matrix, config)?;
    let (removed_noise, noise_estimate) = run_noise_arm(matrix, &records, config)?;
    let empty = BetaEstimate {
        beta: 0.0,
        trace: Vec::new(),
    };
    Ok(finish(
        matrix,
        "bio-is-noise",
        config_json(config),
        removed_noise,
        noise_estimate,
        Vec::new(),
        empty,
        start,
    ))
}
