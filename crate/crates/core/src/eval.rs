//! Scoring heuristic explanations against the enumerated explanations of
//! the same instance.
//!
//! Features occurring most often across all explanations are "common"; a
//! heuristic explanation scores the percentage of its features that are
//! common.

use std::borrow::Borrow;

use crate::error::{Error, Result};
use crate::explain::PiExplanation;

/// Per-feature occurrence counts over the explanations of one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureFrequency {
    /// Indexed by 0-based feature.
    pub counts: Vec<usize>,
    pub total_explanations: usize,
}

impl FeatureFrequency {
    pub fn num_features(&self) -> usize {
        self.counts.len()
    }
}

/// Counts feature occurrences over a stream of explanations.
pub fn frequency<I>(explanations: I, num_features: usize) -> Result<FeatureFrequency>
where
    I: IntoIterator,
    I::Item: Borrow<PiExplanation>,
{
    let mut counts = vec![0usize; num_features];
    let mut total = 0;
    for e in explanations {
        total += 1;
        for &j in e.borrow().features() {
            if j >= num_features {
                return Err(Error::InvalidFeature {
                    index: j,
                    reason: format!("explanation refers past {num_features} features"),
                });
            }
            counts[j] += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptyStream);
    }
    Ok(FeatureFrequency {
        counts,
        total_explanations: total,
    })
}

/// The `k` most frequent features, plus every feature tied with the
/// `k`-th highest count.
pub fn top_common(freq: &FeatureFrequency, k: usize) -> Vec<usize> {
    let k = k.max(1);
    let mut sorted = freq.counts.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let Some(&cutoff) = sorted.get(k - 1).or(sorted.last()) else {
        return Vec::new();
    };
    (0..freq.counts.len())
        .filter(|&j| freq.counts[j] >= cutoff)
        .collect()
}

/// Percentage of `heuristic` features among the common features.
/// `k` defaults to the size of the heuristic explanation.
pub fn hit_score(heuristic: &[usize], freq: &FeatureFrequency, k: Option<usize>) -> Result<f64> {
    let mut features = heuristic.to_vec();
    features.sort_unstable();
    features.dedup();
    if features.is_empty() {
        return Err(Error::EmptyHeuristic);
    }
    let common = top_common(freq, k.unwrap_or(features.len()));
    let hits = features
        .iter()
        .filter(|j| common.binary_search(j).is_ok())
        .count();
    Ok(100.0 * hits as f64 / features.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn explanations(sets: &[&[usize]]) -> Vec<PiExplanation> {
        sets.iter()
            .map(|s| PiExplanation::new(s.to_vec()))
            .collect()
    }

    // 0-based {0:3, 1:1, 2:1, 3:1}
    fn skewed() -> FeatureFrequency {
        frequency(explanations(&[&[0, 1], &[0, 2], &[0, 3]]), 4).unwrap()
    }

    #[test]
    fn counts() {
        let f = frequency(explanations(&[&[0], &[1, 2]]), 3).unwrap();
        assert_eq!(f.counts, vec![1, 1, 1]);
        assert_eq!(f.total_explanations, 2);

        assert_eq!(skewed().counts, vec![3, 1, 1, 1]);
        assert_eq!(skewed().total_explanations, 3);

        let empty = frequency(explanations(&[&[]]), 3).unwrap();
        assert_eq!(empty.counts, vec![0, 0, 0]);
        assert_eq!(empty.total_explanations, 1);
    }

    #[test]
    fn empty_stream_is_an_error() {
        assert_eq!(
            frequency(Vec::<PiExplanation>::new(), 3),
            Err(Error::EmptyStream)
        );
    }

    #[test]
    fn top_common_with_ties() {
        assert_eq!(top_common(&skewed(), 1), vec![0]);
        assert_eq!(top_common(&skewed(), 2), vec![0, 1, 2, 3]);
        let flat = FeatureFrequency {
            counts: vec![2, 2, 2],
            total_explanations: 3,
        };
        assert_eq!(top_common(&flat, 1), vec![0, 1, 2]);
        assert_eq!(top_common(&skewed(), 10), vec![0, 1, 2, 3]);
    }

    #[test]
    fn hit_scores() {
        assert_eq!(hit_score(&[0], &skewed(), Some(1)).unwrap(), 100.0);
        assert_eq!(hit_score(&[1, 4], &skewed(), Some(1)).unwrap(), 0.0);
        assert_eq!(hit_score(&[0, 1], &skewed(), Some(2)).unwrap(), 100.0);
        assert_eq!(hit_score(&[0, 5], &skewed(), None).unwrap(), 50.0);
        assert_eq!(hit_score(&[], &skewed(), None), Err(Error::EmptyHeuristic));
    }
}
