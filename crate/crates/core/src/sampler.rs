//! Score-weighted triplet sampling.
//!
//! Queries are drawn from the inlier candidates with probability
//! `(Z - r_i) / Σ_t (Z - r_t)` where `Z = Σ_t r_t`, so low-scoring objects are
//! preferred. Positives are uniform over the inlier candidates. Negatives are
//! drawn from the outlier candidates with probability proportional to their
//! score, or uniformly from labelled outliers for part of the batch when
//! such outliers are supplied. All draws are with replacement.

use alloc::vec;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::{Distribution, Uniform};
use rand::Rng;

use crate::data::{CandidateSets, OutlierScores, Triplet};
use crate::error::{Error, Result};

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn normalise(mut w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= total;
    }
    w
}

/// Query-sampling probabilities over `inliers`, in the same order.
///
/// A single inlier, or inliers whose scores sum to zero, get uniform
/// weights.
pub fn query_sampling_weights(scores: &OutlierScores, inliers: &[usize]) -> Vec<f64> {
    if inliers.is_empty() {
        return Vec::new();
    }
    let z: f64 = inliers.iter().map(|&i| scores.get(i)).sum();
    let raw: Vec<f64> = inliers.iter().map(|&i| (z - scores.get(i)).max(0.0)).collect();
    if raw.iter().sum::<f64>() > 0.0 {
        normalise(raw)
    } else {
        uniform(inliers.len())
    }
}

/// Negative-sampling probabilities over `outliers`.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeWeights {
    pub weights: Vec<f64>,
    /// Set when every candidate scored zero and uniform weights were used.
    pub uniform_fallback: bool,
}

pub fn negative_sampling_weights(scores: &OutlierScores, outliers: &[usize]) -> NegativeWeights {
    let raw: Vec<f64> = outliers.iter().map(|&i| scores.get(i)).collect();
    if raw.iter().sum::<f64>() > 0.0 {
        NegativeWeights {
            weights: normalise(raw),
            uniform_fallback: false,
        }
    } else {
        NegativeWeights {
            weights: uniform(outliers.len()),
            uniform_fallback: !outliers.is_empty(),
        }
    }
}

/// Number of negatives per batch taken from the labelled pool.
///
/// `⌊b · ratio⌋`, so the default ratio 0.5 leaves `⌈b/2⌉` negatives to the
/// outlier candidates.
pub fn labeled_count(batch_size: usize, ratio: f64) -> usize {
    if ratio <= 0.0 {
        return 0;
    }
    (libm::floor(batch_size as f64 * ratio) as usize).min(batch_size)
}

/// Precomputed sampling distributions for one set of candidate sets and
/// scores.
#[derive(Debug, Clone)]
pub struct TripletSampler {
    inliers: Vec<usize>,
    query_dist: WeightedIndex<f64>,
    outliers: Vec<usize>,
    negative_dist: Option<WeightedIndex<f64>>,
    labeled: Vec<usize>,
    labeled_ratio: f64,
    query_size: usize,
    negative_fallback: bool,
}

impl TripletSampler {
    /// Labelled outliers, when given, are removed from the inlier candidates
    /// before any weights are computed.
    pub fn new(
        sets: &CandidateSets,
        scores: &OutlierScores,
        query_size: usize,
        labeled: Option<&[usize]>,
        labeled_ratio: f64,
    ) -> Result<Self> {
        if query_size < 1 {
            return Err(Error::InvalidParameter {
                field: "query_size",
                reason: "query_size ≥ 1",
            });
        }
        if sets.len() != scores.len() {
            return Err(Error::LengthMismatch("candidate sets and scores"));
        }
        let labeled: Vec<usize> = labeled.unwrap_or(&[]).to_vec();
        if labeled.iter().any(|&i| i >= scores.len()) {
            return Err(Error::LengthMismatch("labelled outlier index out of range"));
        }
        let inliers: Vec<usize> = sets
            .inliers()
            .iter()
            .copied()
            .filter(|i| !labeled.contains(i))
            .collect();
        if inliers.is_empty() {
            return Err(Error::EmptyPool("inlier candidates"));
        }
        let labeled_ratio = if labeled.is_empty() { 0.0 } else { labeled_ratio };
        let outliers = sets.outliers().to_vec();
        if outliers.is_empty() && labeled_ratio < 1.0 {
            return Err(Error::EmptyPool("outlier candidates"));
        }
        let query_dist = WeightedIndex::new(query_sampling_weights(scores, &inliers))
            .map_err(|_| Error::EmptyPool("inlier candidates"))?;
        let (negative_dist, negative_fallback) = if outliers.is_empty() {
            (None, false)
        } else {
            let w = negative_sampling_weights(scores, &outliers);
            let dist = WeightedIndex::new(w.weights).map_err(|_| Error::EmptyPool("outlier candidates"))?;
            (Some(dist), w.uniform_fallback)
        };
        Ok(Self {
            inliers,
            query_dist,
            outliers,
            negative_dist,
            labeled,
            labeled_ratio,
            query_size,
            negative_fallback,
        })
    }

    /// Inlier candidates actually used for queries and positives.
    pub fn inliers(&self) -> &[usize] {
        &self.inliers
    }

    /// Whether negative weights fell back to uniform because every outlier
    /// candidate scored zero.
    pub fn negative_fallback(&self) -> bool {
        self.negative_fallback
    }

    /// Draws `b` triplets. The first `b - k` negatives come from the outlier
    /// candidates and the last `k` from the labelled pool, where `k` is
    /// [`labeled_count`].
    pub fn sample_batch<R: Rng + ?Sized>(&self, b: usize, rng: &mut R) -> Vec<Triplet> {
        let from_labeled = if self.labeled.is_empty() {
            0
        } else {
            labeled_count(b, self.labeled_ratio)
        };
        let positive = Uniform::new(0, self.inliers.len()).expect("non-empty inliers");
        let mut out = Vec::with_capacity(b);
        for s in 0..b {
            let query = (0..self.query_size)
                .map(|_| self.inliers[self.query_dist.sample(rng)])
                .collect();
            let positive = self.inliers[positive.sample(rng)];
            let negative = if s >= b - from_labeled {
                self.labeled[rng.random_range(0..self.labeled.len())]
            } else {
                let dist = self.negative_dist.as_ref().expect("outlier candidates present");
                self.outliers[dist.sample(rng)]
            };
            out.push(Triplet {
                query,
                positive,
                negative,
            });
        }
        out
    }
}

/// One batch of `b` triplets with query sets of size `n`.
pub fn sample_batch<R: Rng + ?Sized>(
    sets: &CandidateSets,
    scores: &OutlierScores,
    n: usize,
    b: usize,
    labeled: Option<&[usize]>,
    rng: &mut R,
) -> Result<Vec<Triplet>> {
    if b < 1 {
        return Err(Error::InvalidParameter {
            field: "batch_size",
            reason: "batch_size ≥ 1",
        });
    }
    Ok(TripletSampler::new(sets, scores, n, labeled, 0.5)?.sample_batch(b, rng))
}
