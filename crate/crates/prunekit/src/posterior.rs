//! Per-instance class posteriors shared by the KNN and logistic-regression
//! weak models.

use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shannon entropy in nats, with 0 ln 0 = 0. Input must be a probability
/// vector (sum within 1e-6 of one).
pub fn entropy(posterior: &[f64]) -> Result<f64> {
    let sum: f64 = posterior.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(sum));
    }
    Ok(posterior
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum())
}

/// argmax with ties broken toward the lower class id.
pub fn argmax_class(posterior: &[f64]) -> usize {
    let mut best = 0;
    for (c, &p) in posterior.iter().enumerate().skip(1) {
        if p > posterior[best] {
            best = c;
        }
    }
    best
}

/// One instance's posterior under a weak model, with its entropy and
/// correctness against the training label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosteriorRecord {
    pub id: usize,
    pub posterior: Vec<f64>,
    pub predicted: usize,
    pub correct: bool,
    pub entropy: f64,
}

impl PosteriorRecord {
    pub fn new(id: usize, posterior: Vec<f64>, true_label: usize) -> Self {
        let predicted = argmax_class(&posterior);
        let entropy = entropy(&posterior).expect("posterior must be normalized");
        Self {
            id,
            posterior,
            predicted,
            correct: predicted == true_label,
            entropy,
        }
    }

    /// Confidence in the instance's true label.
    pub fn true_label_confidence(&self, true_label: usize) -> f64 {
        self.posterior[true_label]
    }

    /// Confidence in the predicted label (max posterior).
    pub fn max_confidence(&self) -> f64 {
        self.posterior[self.predicted]
    }
}

/// Dump records as JSONL, one record per line.
pub fn write_records_jsonl(records: &[PosteriorRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    for record in records {
        let line = serde_json::to_string(record).expect("record serializes");
        writeln!(w, "{line}").map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_known_values() {
        let h = entropy(&[0.25; 4]).unwrap();
        assert!((h - 4.0f64.ln()).abs() < 1e-12);
        assert_eq!(entropy(&[1.0, 0.0, 0.0]).unwrap(), 0.0);
        let h2 = entropy(&[0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!((h2 - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_unnormalized() {
        assert!(matches!(
            entropy(&[0.5, 0.6]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn argmax_tie_breaks_low() {
        assert_eq!(argmax_class(&[0.4, 0.4, 0.2]), 0);
        assert_eq!(argmax_class(&[0.1, 0.5, 0.4]), 1);
    }
}
