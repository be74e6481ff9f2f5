//! Exact k-nearest-neighbor search over the sparse cosine space.
//!
//! Rows are L2-normalized, so the dot product is the cosine similarity.
//! Scoring walks an inverted index (term postings); for each candidate row
//! the products accumulate in ascending feature order, which keeps the sums
//! bitwise identical to a dense dot product over the same data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusMatrix, SparseVector};
use crate::error::{Error, Result};
use crate::posterior::PosteriorRecord;

/// Top-k neighbors, ordered by similarity descending with ties broken by
/// lower instance id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeighborList {
    pub ids: Vec<usize>,
    pub similarities: Vec<f64>,
}

/// Exact KNN over an immutable corpus matrix.
pub struct KnnModel<'a> {
    matrix: &'a CorpusMatrix,
    k: usize,
    postings: Vec<Vec<(u32, f64)>>,
}

impl<'a> KnnModel<'a> {
    pub fn new(matrix: &'a CorpusMatrix, k: usize) -> Self {
        assert!(k >= 1, "k must be >= 1");
        let mut postings: Vec<Vec<(u32, f64)>> = vec![Vec::new(); matrix.n_features];
        for (row_id, row) in matrix.rows.iter().enumerate() {
            for (idx, val) in row.iter() {
                postings[idx as usize].push((row_id as u32, val));
            }
        }
        Self {
            matrix,
            k,
            postings,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &CorpusMatrix {
        self.matrix
    }

    fn scores(&self, query: &SparseVector) -> Vec<f64> {
        let mut scores = vec![0.0f64; self.matrix.n_rows()];
        for (idx, q_val) in query.iter() {
            if (idx as usize) < self.postings.len() {
                for &(row, val) in &self.postings[idx as usize] {
                    scores[row as usize] += q_val * val;
                }
            }
        }
        scores
    }

    /// Exact top-k by cosine similarity. `exclude` removes one candidate id
    /// (leave-one-out queries).
    pub fn search(&self, query: &SparseVector, exclude: Option<usize>) -> Result<NeighborList> {
        let n = self.matrix.n_rows();
        let available = n - usize::from(exclude.map_or(false, |e| e < n));
        if self.k > available {
            return Err(Error::NotEnoughNeighbors {
                k: self.k,
                available,
            });
        }
        let scores = self.scores(query);
        let mut candidates: Vec<usize> = (0..n).filter(|&i| Some(i) != exclude).collect();
        candidates.sort_unstable_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .expect("similarities are finite")
                .then(a.cmp(&b))
        });
        candidates.truncate(self.k);
        let similarities = candidates.iter().map(|&i| scores[i]).collect();
        Ok(NeighborList {
            ids: candidates,
            similarities,
        })
    }

    /// Similarity-weighted class posterior over the query's k neighbors.
    /// The flag is set when all neighbor similarities are zero, in which
    /// case the posterior is uniform.
    pub fn posterior(
        &self,
        query: &SparseVector,
        exclude: Option<usize>,
    ) -> Result<(Vec<f64>, bool)> {
        let neighbors = self.search(query, exclude)?;
        Ok(self.vote(&neighbors))
    }

    fn vote(&self, neighbors: &NeighborList) -> (Vec<f64>, bool) {
        let c = self.matrix.n_classes;
        let mut posterior = vec![0.0f64; c];
        let mut total = 0.0;
        for (&id, &sim) in neighbors.ids.iter().zip(&neighbors.similarities) {
            posterior[self.matrix.labels[id]] += sim;
            total += sim;
        }
        if total <= 0.0 {
            return (vec![1.0 / c as f64; c], true);
        }
        for p in &mut posterior {
            *p /= total;
        }
        (posterior, false)
    }

    /// Leave-one-out posterior records for every training instance.
    pub fn loo_predictions(&self) -> Result<Vec<PosteriorRecord>> {
        let n = self.matrix.n_rows();
        if n < self.k + 1 {
            return Err(Error::NotEnoughNeighbors {
                k: self.k,
                available: n.saturating_sub(1),
            });
        }
        (0..n)
            .into_par_iter()
            .map(|i| {
                let (posterior, _) = self.posterior(&self.matrix.rows[i], Some(i))?;
                Ok(PosteriorRecord::new(i, posterior, self.matrix.labels[i]))
            })
            .collect()
    }

    /// Predict a class for each query row (argmax of the weighted vote).
    pub fn predict(&self, queries: &[SparseVector]) -> Result<Vec<usize>> {
        queries
            .par_iter()
            .map(|q| {
                let (posterior, _) = self.posterior(q, None)?;
                Ok(crate::posterior::argmax_class(&posterior))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SparseVector;

    fn matrix(rows: Vec<(Vec<u32>, Vec<f64>)>, labels: Vec<usize>, n_features: usize) -> CorpusMatrix {
        let n_classes = labels.iter().max().unwrap() + 1;
        CorpusMatrix {
            rows: rows
                .into_iter()
                .map(|(indices, values)| {
                    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let values = values.iter().map(|v| v / norm).collect();
                    SparseVector { indices, values }
                })
                .collect(),
            labels,
            n_features,
            n_classes,
        }
    }

    #[test]
    fn identical_row_is_first_with_similarity_one() {
        let m = matrix(
            vec![
                (vec![0, 1], vec![1.0, 1.0]),
                (vec![2], vec![1.0]),
                (vec![0, 3], vec![1.0, 2.0]),
            ],
            vec![0, 1, 0],
            4,
        );
        let model = KnnModel::new(&m, 2);
        let result = model.search(&m.rows[0].clone(), None).unwrap();
        assert_eq!(result.ids[0], 0);
        assert!((result.similarities[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_query_scores_zero() {
        let m = matrix(
            vec![(vec![0], vec![1.0]), (vec![1], vec![1.0])],
            vec![0, 1],
            4,
        );
        let model = KnnModel::new(&m, 2);
        let q = SparseVector {
            indices: vec![3],
            values: vec![1.0],
        };
        let result = model.search(&q, None).unwrap();
        assert!(result.similarities.iter().all(|&s| s == 0.0));
        // Zero ties break by lower id.
        assert_eq!(result.ids, vec![0, 1]);
    }

    #[test]
    fn k_too_large_errors() {
        let m = matrix(vec![(vec![0], vec![1.0])], vec![0], 2);
        let model = KnnModel::new(&m, 1);
        assert!(matches!(
            model.search(&m.rows[0].clone(), Some(0)),
            Err(Error::NotEnoughNeighbors { .. })
        ));
    }

    #[test]
    fn posterior_weighted_vote_hand_case() {
        // Similarities 0.5, 0.3, 0.2 with labels A, A, B → p(A)=0.8, p(B)=0.2.
        // Construct geometry: query q has overlaps 0.5/0.3/0.2 with the rows.
        let m = CorpusMatrix {
            rows: vec![
                SparseVector { indices: vec![0], values: vec![1.0] },
                SparseVector { indices: vec![1], values: vec![1.0] },
                SparseVector { indices: vec![2], values: vec![1.0] },
            ],
            labels: vec![0, 0, 1],
            n_features: 4,
            n_classes: 2,
        };
        let model = KnnModel::new(&m, 3);
        let q = SparseVector {
            indices: vec![0, 1, 2],
            values: vec![0.5, 0.3, 0.2],
        };
        let (posterior, flag) = model.posterior(&q, None).unwrap();
        assert!(!flag);
        assert!((posterior[0] - 0.8).abs() < 1e-12);
        assert!((posterior[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn zero_evidence_gives_uniform_with_flag() {
        let m = matrix(
            vec![(vec![0], vec![1.0]), (vec![1], vec![1.0])],
            vec![0, 1],
            4,
        );
        let model = KnnModel::new(&m, 2);
        let q = SparseVector {
            indices: vec![3],
            values: vec![1.0],
        };
        let (posterior, flag) = model.posterior(&q, None).unwrap();
        assert!(flag);
        assert_eq!(posterior, vec![0.5, 0.5]);
    }

    #[test]
    fn loo_duplicates_are_confident_and_correct() {
        let m = matrix(
            vec![
                (vec![0], vec![1.0]),
                (vec![0], vec![1.0]),
                (vec![1], vec![1.0]),
                (vec![1], vec![1.0]),
            ],
            vec![0, 0, 1, 1],
            2,
        );
        let model = KnnModel::new(&m, 1);
        let records = model.loo_predictions().unwrap();
        for r in &records {
            assert!(r.correct);
            assert!((r.max_confidence() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn loo_isolated_minority_is_wrong() {
        let m = matrix(
            vec![
                (vec![0], vec![1.0]),
                (vec![0], vec![1.0]),
                (vec![0], vec![1.0]),
            ],
            vec![0, 0, 1],
            2,
        );
        let model = KnnModel::new(&m, 2);
        let records = model.loo_predictions().unwrap();
        assert!(!records[2].correct);
    }
}
