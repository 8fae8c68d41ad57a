//! Rank-based ROC AUC.

use alloc::vec::Vec;

use crate::data::Label;
use crate::error::{Error, Result};

/// Probability that a random outlier scores above a random inlier, with ties
/// counted as one half. Computed from average ranks (Mann-Whitney U).
pub fn auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch("scores and labels"));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::InvalidScore(i));
    }
    let n_out = labels.iter().filter(|l| l.is_outlier()).count();
    let n_in = labels.len() - n_out;
    if n_out == 0 || n_in == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // sum of 1-based average ranks of the outliers
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let avg_rank = (start + 1 + end) as f64 / 2.0;
        let outliers_in_tie = order[start..end].iter().filter(|&&i| labels[i].is_outlier()).count();
        rank_sum += avg_rank * outliers_in_tie as f64;
        start = end;
    }
    let u = rank_sum - (n_out * (n_out + 1)) as f64 / 2.0;
    Ok(u / (n_out as f64 * n_in as f64))
}
