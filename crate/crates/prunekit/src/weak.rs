//! Calibrated weak classifier: multinomial (softmax) logistic regression on
//! sparse TF-IDF rows, out-of-fold posterior estimation, and calibration
//! diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{stratified_kfold, CorpusMatrix, SparseVector};
use crate::error::{Error, Result};
use crate::posterior::PosteriorRecord;

/// Training hyperparameters for [`train_logreg`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LogRegParams {
    pub l2_strength: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        Self {
            l2_strength: 1.0,
            max_iters: 500,
            tol: 1e-6,
        }
    }
}

/// Multinomial softmax model. Weights are row-major C x V.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub n_classes: usize,
    pub n_features: usize,
    pub iterations: usize,
    pub final_objective: f64,
}

impl LinearModel {
    fn scores(&self, row: &SparseVector) -> Vec<f64> {
        let mut scores = self.bias.clone();
        for (idx, val) in row.iter() {
            let f = idx as usize;
            if f < self.n_features {
                for c in 0..self.n_classes {
                    scores[c] += self.weights[c * self.n_features + f] * val;
                }
            }
        }
        scores
    }

    pub fn posterior(&self, row: &SparseVector) -> Vec<f64> {
        softmax(&self.scores(row))
    }

    pub fn predict(&self, row: &SparseVector) -> usize {
        crate::posterior::argmax_class(&self.posterior(row))
    }
}

pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Mean cross-entropy plus (l2/2)||W||^2 (bias unregularized), and its
/// gradient. Per-instance terms are averaged, so duplicating the training
/// set leaves the decision function unchanged.
fn objective_and_gradient(
    matrix: &CorpusMatrix,
    weights: &[f64],
    bias: &[f64],
    l2: f64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let n = matrix.n_rows() as f64;
    let c = matrix.n_classes;
    let v = matrix.n_features;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0f64; c * v];
    let mut grad_b = vec![0.0f64; c];
    for (row, &label) in matrix.rows.iter().zip(&matrix.labels) {
        let mut scores = bias.to_vec();
        for (idx, val) in row.iter() {
            let f = idx as usize;
            for cls in 0..c {
                scores[cls] += weights[cls * v + f] * val;
            }
        }
        let p = softmax(&scores);
        loss -= p[label].max(1e-300).ln();
        for cls in 0..c {
            let err = (p[cls] - f64::from(cls == label)) / n;
            grad_b[cls] += err;
            for (idx, val) in row.iter() {
                grad_w[cls * v + idx as usize] += err * val;
            }
        }
    }
    loss /= n;
    let mut reg = 0.0;
    for (g, &w) in grad_w.iter_mut().zip(weights) {
        *g += l2 * w;
        reg += w * w;
    }
    (loss + 0.5 * l2 * reg, grad_w, grad_b)
}

/// Deterministic full-batch gradient descent with backtracking (Armijo)
/// line search. Stops when the relative objective decrease falls below
/// `tol` or `max_iters` is reached.
pub fn train_logreg(matrix: &CorpusMatrix, params: &LogRegParams) -> Result<LinearModel> {
    let c = matrix.n_classes;
    let distinct: std::collections::BTreeSet<usize> = matrix.labels.iter().copied().collect();
    if distinct.len() < 2 {
        return Err(Error::SingleClass(distinct.len()));
    }
    let v = matrix.n_features;
    let mut weights = vec![0.0f64; c * v];
    let mut bias = vec![0.0f64; c];
    let (mut obj, mut grad_w, mut grad_b) =
        objective_and_gradient(matrix, &weights, &bias, params.l2_strength);
    let mut step = 1.0f64;
    let mut iterations = 0;
    for _ in 0..params.max_iters {
        iterations += 1;
        let grad_norm_sq: f64 = grad_w.iter().map(|g| g * g).sum::<f64>()
            + grad_b.iter().map(|g| g * g).sum::<f64>();
        if grad_norm_sq < 1e-24 {
            break;
        }
        step *= 2.0;
        let (new_obj, new_w, new_b, new_gw, new_gb) = loop {
            let cand_w: Vec<f64> = weights
                .iter()
                .zip(&grad_w)
                .map(|(w, g)| w - step * g)
                .collect();
            let cand_b: Vec<f64> = bias
                .iter()
                .zip(&grad_b)
                .map(|(b, g)| b - step * g)
                .collect();
            let (cand_obj, cand_gw, cand_gb) =
                objective_and_gradient(matrix, &cand_w, &cand_b, params.l2_strength);
            if cand_obj <= obj - 1e-4 * step * grad_norm_sq || step < 1e-12 {
                break (cand_obj, cand_w, cand_b, cand_gw, cand_gb);
            }
            step *= 0.5;
        };
        let rel_decrease = (obj - new_obj) / obj.abs().max(1.0);
        weights = new_w;
        bias = new_b;
        grad_w = new_gw;
        grad_b = new_gb;
        obj = new_obj;
        if rel_decrease >= 0.0 && rel_decrease < params.tol {
            break;
        }
    }
    Ok(LinearModel {
        weights,
        bias,
        n_classes: c,
        n_features: v,
        iterations,
        final_objective: obj,
    })
}

/// Softmax posteriors for a batch of rows.
pub fn predict_posterior(model: &LinearModel, rows: &[SparseVector]) -> Vec<Vec<f64>> {
    rows.par_iter().map(|r| model.posterior(r)).collect()
}

/// Out-of-fold posteriors: each instance is predicted by a model trained on
/// the other folds, so confidence is not inflated by memorization.
pub fn cross_predict(
    matrix: &CorpusMatrix,
    folds: usize,
    seed: u64,
    params: &LogRegParams,
) -> Result<Vec<PosteriorRecord>> {
    let plan = stratified_kfold(&matrix.labels, folds, seed)?;
    let per_fold: Vec<Result<Vec<PosteriorRecord>>> = (0..folds)
        .into_par_iter()
        .map(|fold| {
            let train_ids = plan.complement_ids(fold);
            let test_ids = plan.fold_ids(fold);
            let model = train_logreg(&matrix.subset(&train_ids), params)?;
            Ok(test_ids
                .into_iter()
                .map(|id| {
                    PosteriorRecord::new(id, model.posterior(&matrix.rows[id]), matrix.labels[id])
                })
                .collect())
        })
        .collect();
    let mut records = Vec::with_capacity(matrix.n_rows());
    for fold_records in per_fold {
        records.extend(fold_records?);
    }
    records.sort_by_key(|r| r.id);
    Ok(records)
}

/// Reliability diagram data over equal-width confidence bins, plus the
/// expected calibration error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub bin_edges: Vec<f64>,
    pub bin_counts: Vec<usize>,
    pub bin_mean_confidence: Vec<f64>,
    pub bin_accuracy: Vec<f64>,
    pub ece: f64,
}

pub fn calibration_report(records: &[PosteriorRecord], bins: usize) -> CalibrationReport {
    assert!(bins >= 1 && !records.is_empty());
    let mut counts = vec![0usize; bins];
    let mut conf_sums = vec![0.0f64; bins];
    let mut correct = vec![0usize; bins];
    for r in records {
        let conf = r.max_confidence();
        let b = ((conf * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
        conf_sums[b] += conf;
        correct[b] += usize::from(r.correct);
    }
    let n = records.len() as f64;
    let mut ece = 0.0;
    let mut mean_conf = vec![0.0f64; bins];
    let mut accuracy = vec![0.0f64; bins];
    for b in 0..bins {
        if counts[b] > 0 {
            mean_conf[b] = conf_sums[b] / counts[b] as f64;
            accuracy[b] = correct[b] as f64 / counts[b] as f64;
            ece += (counts[b] as f64 / n) * (accuracy[b] - mean_conf[b]).abs();
        }
    }
    CalibrationReport {
        bin_edges: (0..=bins).map(|b| b as f64 / bins as f64).collect(),
        bin_counts: counts,
        bin_mean_confidence: mean_conf,
        bin_accuracy: accuracy,
        ece,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_row(idx: u32) -> SparseVector {
        SparseVector {
            indices: vec![idx],
            values: vec![1.0],
        }
    }

    fn separable(n_per_class: usize) -> CorpusMatrix {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_per_class {
            rows.push(unit_row((i % 2) as u32)); // class 0 on features 0/1
            labels.push(0);
            rows.push(unit_row(4 + (i % 2) as u32)); // class 1 on features 4/5
            labels.push(1);
        }
        CorpusMatrix {
            rows,
            labels,
            n_features: 8,
            n_classes: 2,
        }
    }

    #[test]
    fn separable_reaches_full_training_accuracy() {
        let m = separable(5);
        let params = LogRegParams {
            l2_strength: 1e-4,
            ..LogRegParams::default()
        };
        let model = train_logreg(&m, &params).unwrap();
        for (row, &label) in m.rows.iter().zip(&m.labels) {
            assert_eq!(model.predict(row), label);
        }
    }

    #[test]
    fn single_class_errors() {
        let m = CorpusMatrix {
            rows: vec![unit_row(0), unit_row(1)],
            labels: vec![0, 0],
            n_features: 2,
            n_classes: 1,
        };
        assert!(matches!(
            train_logreg(&m, &LogRegParams::default()),
            Err(Error::SingleClass(1))
        ));
    }

    #[test]
    fn duplicated_training_set_gives_same_decision_function() {
        let m = separable(4);
        let mut doubled_ids: Vec<usize> = (0..m.n_rows()).collect();
        doubled_ids.extend(0..m.n_rows());
        let doubled = m.subset(&doubled_ids);
        let params = LogRegParams::default();
        let a = train_logreg(&m, &params).unwrap();
        let b = train_logreg(&doubled, &params).unwrap();
        for (wa, wb) in a.weights.iter().zip(&b.weights) {
            assert!((wa - wb).abs() < 1e-4, "{wa} vs {wb}");
        }
    }

    #[test]
    fn zero_model_gives_uniform_posterior() {
        let model = LinearModel {
            weights: vec![0.0; 3 * 4],
            bias: vec![0.0; 3],
            n_classes: 3,
            n_features: 4,
            iterations: 0,
            final_objective: 0.0,
        };
        let p = model.posterior(&unit_row(1));
        for &x in &p {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dominant_bias_gives_near_one_hot() {
        let model = LinearModel {
            weights: vec![0.0; 2 * 4],
            bias: vec![50.0, 0.0],
            n_classes: 2,
            n_features: 4,
            iterations: 0,
            final_objective: 0.0,
        };
        let p = model.posterior(&unit_row(0));
        assert!(p[0] > 0.999999);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let m = separable(3);
        let v = m.n_features;
        let c = m.n_classes;
        let weights: Vec<f64> = (0..c * v).map(|i| ((i * 37 % 11) as f64 - 5.0) / 10.0).collect();
        let bias: Vec<f64> = (0..c).map(|i| (i as f64 - 0.5) / 4.0).collect();
        let l2 = 0.3;
        let (_, grad_w, grad_b) = objective_and_gradient(&m, &weights, &bias, l2);
        let h = 1e-6;
        let f = |w: &[f64], b: &[f64]| objective_and_gradient(&m, w, b, l2).0;
        for i in 0..c * v {
            let mut wp = weights.clone();
            let mut wm = weights.clone();
            wp[i] += h;
            wm[i] -= h;
            let numeric = (f(&wp, &bias) - f(&wm, &bias)) / (2.0 * h);
            let denom = grad_w[i].abs().max(1e-4);
            assert!(
                ((grad_w[i] - numeric) / denom).abs() < 1e-4,
                "weight grad {i}: {} vs {}",
                grad_w[i],
                numeric
            );
        }
        for i in 0..c {
            let mut bp = bias.clone();
            let mut bm = bias.clone();
            bp[i] += h;
            bm[i] -= h;
            let numeric = (f(&weights, &bp) - f(&weights, &bm)) / (2.0 * h);
            let denom = grad_b[i].abs().max(1e-4);
            assert!(((grad_b[i] - numeric) / denom).abs() < 1e-4);
        }
    }

    #[test]
    fn matches_independent_fixed_step_descent() {
        let m = separable(8);
        let params = LogRegParams {
            l2_strength: 0.5,
            max_iters: 2000,
            tol: 1e-12,
        };
        let model = train_logreg(&m, &params).unwrap();

        // Independent oracle: plain fixed-step dense gradient descent.
        let c = m.n_classes;
        let v = m.n_features;
        let mut w = vec![0.0f64; c * v];
        let mut b = vec![0.0f64; c];
        let mut obj = f64::INFINITY;
        for _ in 0..50_000 {
            let (o, gw, gb) = objective_and_gradient(&m, &w, &b, params.l2_strength);
            for (wi, gi) in w.iter_mut().zip(&gw) {
                *wi -= 0.5 * gi;
            }
            for (bi, gi) in b.iter_mut().zip(&gb) {
                *bi -= 0.5 * gi;
            }
            if (obj - o).abs() < 1e-13 {
                break;
            }
            obj = o;
        }
        assert!(
            (model.final_objective - obj).abs() < 1e-3,
            "{} vs {}",
            model.final_objective,
            obj
        );
    }

    #[test]
    fn cross_predict_covers_each_instance_once_and_is_deterministic() {
        let m = separable(10); // 20 instances
        let params = LogRegParams::default();
        let a = cross_predict(&m, 5, 3, &params).unwrap();
        let b = cross_predict(&m, 5, 3, &params).unwrap();
        assert_eq!(a.len(), m.n_rows());
        let ids: Vec<usize> = a.iter().map(|r| r.id).collect();
        assert_eq!(ids, (0..m.n_rows()).collect::<Vec<_>>());
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.posterior, rb.posterior);
        }
        // Separable data: all out-of-fold predictions correct.
        assert!(a.iter().all(|r| r.correct));
    }

    #[test]
    fn calibration_report_extremes_and_hand_case() {
        let perfect: Vec<PosteriorRecord> = (0..5)
            .map(|i| PosteriorRecord::new(i, vec![1.0, 0.0], 0))
            .collect();
        assert_eq!(calibration_report(&perfect, 10).ece, 0.0);

        let wrong: Vec<PosteriorRecord> = (0..5)
            .map(|i| PosteriorRecord::new(i, vec![1.0, 0.0], 1))
            .collect();
        assert_eq!(calibration_report(&wrong, 10).ece, 1.0);

        // Four bins by hand: 2 records at conf 0.6 (1 correct) land in bin
        // [0.5,0.75), 2 at conf 0.9 (both correct) land in bin [0.75,1.0].
        let records = vec![
            PosteriorRecord::new(0, vec![0.6, 0.4], 0),
            PosteriorRecord::new(1, vec![0.6, 0.4], 1),
            PosteriorRecord::new(2, vec![0.9, 0.1], 0),
            PosteriorRecord::new(3, vec![0.9, 0.1], 0),
        ];
        let report = calibration_report(&records, 4);
        let expected = (2.0 / 4.0) * (0.5f64 - 0.6).abs() + (2.0 / 4.0) * (1.0f64 - 0.9).abs();
        assert!((report.ece - expected).abs() < 1e-12);
    }
}
