//! Selection results shared by every instance-selection method.

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusMatrix;

/// Outcome of one selection run: a partition of 0..n into retained and
/// removed ids plus the wall-clock cost of producing it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionResult {
    pub method: String,
    pub params: serde_json::Value,
    pub retained: Vec<usize>,
    pub removed: Vec<usize>,
    pub time_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annotations: Option<serde_json::Value>,
}

impl SelectionResult {
    pub fn from_mask(
        method: &str,
        params: serde_json::Value,
        keep: &[bool],
        time_seconds: f64,
    ) -> Self {
        let retained = (0..keep.len()).filter(|&i| keep[i]).collect();
        let removed = (0..keep.len()).filter(|&i| !keep[i]).collect();
        Self {
            method: method.to_owned(),
            params,
            retained,
            removed,
            time_seconds,
            annotations: None,
        }
    }

    pub fn n(&self) -> usize {
        self.retained.len() + self.removed.len()
    }

    /// Fraction of instances removed.
    pub fn reduction(&self) -> f64 {
        self.removed.len() as f64 / self.n() as f64
    }
}

/// Re-add one instance per emptied class so downstream classifiers always
/// see every class. The re-added instance is the removed one with the
/// highest total similarity to its own class (densest representative).
pub fn ensure_class_coverage(matrix: &CorpusMatrix, keep: &mut [bool]) {
    let mut covered = vec![false; matrix.n_classes];
    for (i, &k) in keep.iter().enumerate() {
        if k {
            covered[matrix.labels[i]] = true;
        }
    }
    for class in 0..matrix.n_classes {
        if covered[class] {
            continue;
        }
        let members: Vec<usize> = (0..matrix.n_rows())
            .filter(|&i| matrix.labels[i] == class)
            .collect();
        if members.is_empty() {
            continue; // class absent from this training partition
        }
        let densities: Vec<f64> = members
            .iter()
            .map(|&x| {
                members
                    .iter()
                    .filter(|&&y| y != x)
                    .map(|&y| matrix.rows[x].dot(&matrix.rows[y]))
                    .sum()
            })
            .collect();
        let best = (0..members.len())
            .max_by(|&a, &b| {
                densities[a]
                    .partial_cmp(&densities[b])
                    .unwrap()
                    .then(members[b].cmp(&members[a]))
            })
            .unwrap();
        keep[members[best]] = true;
    }
}
