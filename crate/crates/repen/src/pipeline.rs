//! End-to-end run: initial Sp scores, Cantelli candidate sets, training,
//! transform, and Sp detection in the learned space.

use std::time::Instant;

use repen_core::learner::{train, transform};
use repen_core::threshold::candidate_sets;
use repen_core::{
    Backend, CandidateSets, Dataset, HyperParams, OutlierScores, RepresentationModel, SpConfig, TrainReport,
};

use crate::{parallel, Result};

/// Sp settings derived from the hyperparameters. The ensemble seed is the run
/// seed, so the original and learned spaces are scored with the same
/// subsamples.
pub fn sp_config(params: &HyperParams, backend: Backend) -> SpConfig {
    SpConfig {
        subsample_size: params.subsample_size,
        ensemble_size: params.ensemble_size,
        backend,
        seed: params.rng_seed,
    }
}

/// Wall-clock seconds of each stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub initial_scoring: f64,
    pub training: f64,
    pub transform: f64,
    pub detection: f64,
}

impl Timings {
    /// Offline part: initial scoring, thresholding, training and transform.
    pub fn offline(&self) -> f64 {
        self.initial_scoring + self.training + self.transform
    }

    pub fn total(&self) -> f64 {
        self.offline() + self.detection
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub initial_scores: OutlierScores,
    pub sets: CandidateSets,
    /// The top-k fallback replaced an empty Cantelli outlier set.
    pub fallback: bool,
    pub model: RepresentationModel,
    pub report: TrainReport,
    pub embedded: Dataset,
    pub scores: OutlierScores,
    pub timings: Timings,
}

pub fn run(
    dataset: &Dataset,
    params: &HyperParams,
    labeled: Option<&[usize]>,
    threads: usize,
) -> Result<PipelineOutput> {
    params.validate()?;
    dataset.ensure_valid()?;
    let t = Instant::now();
    let initial_scores = parallel::sp_score(dataset, &sp_config(params, Backend::KdTree), threads)?;
    let (sets, fallback) = candidate_sets(&initial_scores, params.alpha)?;
    if fallback {
        log::warn!(
            "empty outlier candidate set; using the top {} objects",
            sets.outliers().len()
        );
    }
    let initial_scoring = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (model, report) = train(dataset, &sets, &initial_scores, params, labeled)?;
    let training = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let embedded = transform(&model, dataset)?;
    let transform_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let scores = parallel::sp_score(&embedded, &sp_config(params, Backend::KdTree), threads)?;
    let detection = t.elapsed().as_secs_f64();

    Ok(PipelineOutput {
        initial_scores,
        sets,
        fallback,
        model,
        report,
        embedded,
        scores,
        timings: Timings {
            initial_scoring,
            training,
            transform: transform_secs,
            detection,
        },
    })
}

/// Scores a dataset with a trained model: transform, then Sp with the k-d
/// tree backend.
pub fn detect(
    model: &RepresentationModel,
    dataset: &Dataset,
    params: &HyperParams,
    threads: usize,
) -> Result<(Dataset, OutlierScores)> {
    let embedded = transform(model, dataset)?;
    let scores = parallel::sp_score(&embedded, &sp_config(params, Backend::KdTree), threads)?;
    Ok((embedded, scores))
}
