//! Cantelli thresholding of outlier scores into candidate sets.
//!
//! `O = { i : r_i ≥ μ + αδ }` with population moments of the score vector.
//! For the empirical distribution the one-sided Chebyshev inequality gives
//! `|O| / N ≤ 1 / (1 + α²)` exactly.

use alloc::vec::Vec;

use crate::data::{CandidateSets, OutlierScores};
use crate::error::{Error, Result};

/// Upper bound on the fraction of objects selected by [`cantelli_partition`].
pub fn false_positive_bound(alpha: f64) -> f64 {
    1.0 / (1.0 + alpha * alpha)
}

/// Splits objects at `μ + αδ`. Ties at the threshold go to `O`. Constant
/// scores (`δ = 0`) give an empty `O`.
pub fn cantelli_partition(scores: &OutlierScores, alpha: f64) -> Result<CandidateSets> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParameter {
            field: "alpha",
            reason: "alpha ≥ 0",
        });
    }
    if scores.std() == 0.0 {
        return Ok(CandidateSets::from_mask(&alloc::vec![false; scores.len()]));
    }
    let threshold = scores.mean() + alpha * scores.std();
    let mask: Vec<bool> = scores.as_slice().iter().map(|&r| r >= threshold).collect();
    Ok(CandidateSets::from_mask(&mask))
}

/// Size of the top-k fallback pool: `max(1, ⌈0.05 N⌉)`.
pub fn fallback_size(n: usize) -> usize {
    n.div_ceil(20).max(1)
}

/// The `k` highest-scoring objects as `O`. Equal scores are ordered by index.
pub fn top_k_partition(scores: &OutlierScores, k: usize) -> CandidateSets {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    let s = scores.as_slice();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let mut mask = alloc::vec![false; s.len()];
    for &i in order.iter().take(k.min(s.len().saturating_sub(1))) {
        mask[i] = true;
    }
    CandidateSets::from_mask(&mask)
}

/// Cantelli partition with the top-k fallback engaged when `O` would be
/// empty. The flag reports whether the fallback was used.
pub fn candidate_sets(scores: &OutlierScores, alpha: f64) -> Result<(CandidateSets, bool)> {
    let sets = cantelli_partition(scores, alpha)?;
    if sets.outliers().is_empty() {
        Ok((top_k_partition(scores, fallback_size(scores.len())), true))
    } else {
        Ok((sets, false))
    }
}
