//! Learned low-dimensional representations for random nearest-neighbour
//! outlier detection.
//!
//! The crate is `no_std` (it needs `alloc`). It contains the numerical
//! pieces of the pipeline:
//!
//! - [`data`]: datasets (dense or sparse rows), score vectors, candidate sets,
//!   triplets and hyperparameters.
//! - [`sp`]: the subsample nearest-neighbour detector with a bagging ensemble,
//!   backed by brute force or a [`kdtree`].
//! - [`threshold`]: Cantelli thresholding of scores into outlier and inlier
//!   candidate sets.
//! - [`sampler`]: score-weighted triplet sampling.
//! - [`learner`]: the ReLU representation, triplet hinge loss and its
//!   gradient, ADADELTA, and the training loop.
//! - [`metrics`]: rank-based ROC AUC.
//! - [`srp`]: sparse random projection, used as a baseline.
//!
//! File formats, synthetic data, experiments and the command-line tool live in
//! the `repen` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod data;
mod error;
pub mod kdtree;
pub mod learner;
pub mod metrics;
pub mod rng;
pub mod sampler;
pub mod sp;
pub mod srp;
pub mod threshold;

pub use data::{CandidateSets, Dataset, HyperParams, Label, OutlierScores, Row, SparseRow, Storage, Triplet};
pub use error::{Error, Result};
pub use learner::{RepresentationModel, TrainReport};
pub use sp::{Backend, SpConfig};
