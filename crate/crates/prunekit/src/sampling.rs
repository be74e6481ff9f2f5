//! Weighted random sampling without replacement.
//!
//! Uses the exponential-key order method: each positive-weight id draws
//! u in (0,1) and is keyed by u^(1/w); the m largest keys win. Inclusion
//! probability is monotone in weight, the draw is a single pass, and a
//! fixed seed gives a fixed sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub fn weighted_sample_without_replacement(
    weights: &[f64],
    m: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let positive = weights.iter().filter(|&&w| w > 0.0).count();
    if m > positive {
        return Err(Error::SampleTooLarge {
            requested: m,
            available: positive,
        });
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Draw u for every id in order so the stream is independent of which
    // weights happen to be positive.
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(positive);
    for (id, &w) in weights.iter().enumerate() {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        if w > 0.0 {
            keyed.push((u.powf(1.0 / w), id));
        }
    }
    keyed.sort_unstable_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut ids: Vec<usize> = keyed[..m].iter().map(|&(_, id)| id).collect();
    ids.sort_unstable();
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustion_returns_exactly_the_positive_set() {
        let weights = [0.0, 2.0, 0.0, 1.0, 3.0];
        let ids = weighted_sample_without_replacement(&weights, 3, 1).unwrap();
        assert_eq!(ids, vec![1, 3, 4]);
    }

    #[test]
    fn empty_sample_and_oversized_request() {
        let weights = [1.0, 1.0];
        assert!(weighted_sample_without_replacement(&weights, 0, 0)
            .unwrap()
            .is_empty());
        assert!(matches!(
            weighted_sample_without_replacement(&weights, 3, 0),
            Err(Error::SampleTooLarge { .. })
        ));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let weights: Vec<f64> = (1..=50).map(|i| i as f64).collect();
        let a = weighted_sample_without_replacement(&weights, 10, 99).unwrap();
        let b = weighted_sample_without_replacement(&weights, 10, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn heavy_weight_dominates() {
        let mut weights = vec![1e-6; 20];
        weights[7] = 1e6;
        let mut hits = 0;
        for seed in 0..1000 {
            let ids = weighted_sample_without_replacement(&weights, 1, seed).unwrap();
            if ids == vec![7] {
                hits += 1;
            }
        }
        assert!(hits >= 990, "heavy id chosen {hits}/1000 times");
    }

    #[test]
    fn zero_weight_never_sampled() {
        let weights = [0.0, 1.0, 1.0, 0.0, 1.0];
        for seed in 0..200 {
            let ids = weighted_sample_without_replacement(&weights, 2, seed).unwrap();
            assert!(!ids.contains(&0) && !ids.contains(&3));
        }
    }
}
