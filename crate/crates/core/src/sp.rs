//! Subsample nearest-neighbour outlier scoring with a bagging ensemble.
//!
//! Each ensemble member draws a random subsample `S_j` (without replacement)
//! and scores every object by its squared Euclidean distance to the nearest
//! member of `S_j`. The final score is the mean over members. An object never
//! counts as its own neighbour; if the subsample holds only the object itself
//! the member distance is 0.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::{sq_dist, sq_euclidean, Dataset, OutlierScores, Row, Storage};
use crate::error::{Error, Result};
use crate::kdtree::{KdTree, MAX_TREE_DIM};
use crate::learner::{transform, RepresentationModel};
use crate::rng::{self, Purpose};

/// Nearest-neighbour search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    BruteForce,
    /// k-d tree over each subsample. Only used for dense data with at most
    /// [`MAX_TREE_DIM`] features; otherwise brute force runs instead.
    KdTree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpConfig {
    pub subsample_size: usize,
    pub ensemble_size: usize,
    pub backend: Backend,
    pub seed: u64,
}

impl Default for SpConfig {
    fn default() -> Self {
        Self {
            subsample_size: 8,
            ensemble_size: 50,
            backend: Backend::BruteForce,
            seed: 0,
        }
    }
}

impl SpConfig {
    fn check(&self, n_objects: usize) -> Result<()> {
        if self.subsample_size < 1 {
            return Err(Error::InvalidParameter {
                field: "subsample_size",
                reason: "subsample_size ≥ 1",
            });
        }
        if self.ensemble_size < 1 {
            return Err(Error::InvalidParameter {
                field: "ensemble_size",
                reason: "ensemble_size ≥ 1",
            });
        }
        if self.subsample_size >= n_objects {
            return Err(Error::SubsampleTooLarge {
                subsample_size: self.subsample_size,
                n_objects,
            });
        }
        Ok(())
    }
}

/// Smallest squared distance from `query` to a subsample member, skipping
/// the member whose id equals `query_id`. Returns 0 when nothing is left
/// after the exclusion.
pub fn nn_dist(query: &[f64], query_id: usize, subsample: &[(usize, &[f64])]) -> Result<f64> {
    if subsample.is_empty() {
        return Err(Error::EmptyPool("subsample"));
    }
    let mut best = f64::INFINITY;
    for &(id, p) in subsample {
        if p.len() != query.len() {
            return Err(Error::DimensionMismatch {
                expected: query.len(),
                actual: p.len(),
            });
        }
        if id != query_id {
            best = best.min(sq_euclidean(query, p));
        }
    }
    Ok(if best.is_finite() { best } else { 0.0 })
}

/// Draws the subsample of ensemble member `member`: `size` distinct indices
/// from `0..n_objects`, from the member's own random stream.
pub fn draw_subsample(n_objects: usize, size: usize, seed: u64, member: usize) -> Vec<usize> {
    let mut rng = rng::stream(seed, Purpose::Subsample, member as u64);
    rand::seq::index::sample(&mut rng, n_objects, size).into_vec()
}

pub fn draw_subsamples(n_objects: usize, config: &SpConfig) -> Result<Vec<Vec<usize>>> {
    config.check(n_objects)?;
    Ok((0..config.ensemble_size)
        .map(|j| draw_subsample(n_objects, config.subsample_size, config.seed, j))
        .collect())
}

/// Reusable per-dataset state for repeated member scoring.
pub struct Scorer<'a> {
    dataset: &'a Dataset,
    backend: Backend,
    norms: Option<Vec<f64>>,
}

impl<'a> Scorer<'a> {
    pub fn new(dataset: &'a Dataset, backend: Backend) -> Self {
        let use_tree = backend == Backend::KdTree && !dataset.is_sparse() && dataset.n_features() <= MAX_TREE_DIM;
        let norms = dataset.is_sparse().then(|| dataset.sq_norms());
        Self {
            dataset,
            backend: if use_tree { Backend::KdTree } else { Backend::BruteForce },
            norms,
        }
    }

    /// The backend actually used after the dimension and storage checks.
    pub fn effective_backend(&self) -> Backend {
        self.backend
    }

    /// Nearest-neighbour distance of every object to the given subsample.
    pub fn member_distances(&self, subsample: &[usize]) -> Result<Vec<f64>> {
        let n = self.dataset.n_objects();
        if subsample.is_empty() {
            return Err(Error::EmptyPool("subsample"));
        }
        if subsample.iter().any(|&j| j >= n) {
            return Err(Error::LengthMismatch("subsample index out of range"));
        }
        let mut out = vec![0.0; n];
        match (self.backend, self.dataset.storage()) {
            (Backend::KdTree, Storage::Dense(values)) => {
                let d = self.dataset.n_features();
                let tree = KdTree::build(d, subsample.iter().map(|&j| (j, &values[j * d..(j + 1) * d])));
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = tree
                        .nearest(&values[i * d..(i + 1) * d], Some(i))
                        .map_or(0.0, |(_, dist)| dist);
                }
            }
            (_, Storage::Dense(values)) => {
                let d = self.dataset.n_features();
                for (i, slot) in out.iter_mut().enumerate() {
                    let x = &values[i * d..(i + 1) * d];
                    let mut best = f64::INFINITY;
                    for &j in subsample {
                        if j != i {
                            best = best.min(sq_euclidean(x, &values[j * d..(j + 1) * d]));
                        }
                    }
                    *slot = if best.is_finite() { best } else { 0.0 };
                }
            }
            (_, Storage::Sparse(_)) => {
                let norms = self.norms.as_deref().unwrap_or(&[]);
                let members: Vec<(usize, Row<'_>)> = subsample.iter().map(|&j| (j, self.dataset.row(j))).collect();
                for (i, slot) in out.iter_mut().enumerate() {
                    let x = self.dataset.row(i);
                    let mut best = f64::INFINITY;
                    for &(j, ref r) in &members {
                        if j != i {
                            let dist = if norms.is_empty() {
                                sq_dist(&x, r)
                            } else {
                                (norms[i] + norms[j] - 2.0 * x.dot(r)).max(0.0)
                            };
                            best = best.min(dist);
                        }
                    }
                    *slot = if best.is_finite() { best } else { 0.0 };
                }
            }
        }
        Ok(out)
    }
}

/// Scores every object against explicitly given subsamples and averages over
/// them in order.
pub fn score_with_subsamples(dataset: &Dataset, subsamples: &[Vec<usize>], backend: Backend) -> Result<OutlierScores> {
    if subsamples.is_empty() {
        return Err(Error::InvalidParameter {
            field: "ensemble_size",
            reason: "ensemble_size ≥ 1",
        });
    }
    let scorer = Scorer::new(dataset, backend);
    let mut sums = vec![0.0; dataset.n_objects()];
    for s in subsamples {
        let dists = scorer.member_distances(s)?;
        for (acc, d) in sums.iter_mut().zip(dists) {
            *acc += d;
        }
    }
    mean_scores(sums, subsamples.len())
}

/// Divides summed member distances by the ensemble size.
pub fn mean_scores(mut sums: Vec<f64>, ensemble_size: usize) -> Result<OutlierScores> {
    let m = ensemble_size as f64;
    for s in sums.iter_mut() {
        *s /= m;
    }
    OutlierScores::new(sums)
}

/// Ensemble Sp scores of every object in the dataset's own feature space.
pub fn sp_score(dataset: &Dataset, config: &SpConfig) -> Result<OutlierScores> {
    dataset.ensure_valid()?;
    let subsamples = draw_subsamples(dataset.n_objects(), config)?;
    score_with_subsamples(dataset, &subsamples, config.backend)
}

/// Ensemble Sp scores computed in the representation space of `model`.
pub fn sp_score_embedded(dataset: &Dataset, model: &RepresentationModel, config: &SpConfig) -> Result<OutlierScores> {
    let embedded = transform(model, dataset)?;
    sp_score(&embedded, config)
}
