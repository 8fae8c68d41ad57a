//! Shared domain types: datasets, score vectors, candidate sets, triplets and
//! hyperparameters.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Ground-truth flag of an object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Inlier,
    Outlier,
}

impl Label {
    pub fn is_outlier(self) -> bool {
        matches!(self, Label::Outlier)
    }
}

/// One sparse row: `(feature index, value)` pairs with strictly increasing
/// indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseRow {
    pub fn new(indices: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::LengthMismatch("sparse row indices and values"));
        }
        Ok(Self { indices, values })
    }

    /// Builds a row from unordered pairs, sorting by index. Duplicate indices
    /// are kept and will be reported by [`Dataset::validate`].
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.sort_by_key(|&(i, _)| i);
        let (indices, values) = pairs.into_iter().unzip();
        Self { indices, values }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().zip(&self.values).map(|(&i, &v)| (i as usize, v))
    }
}

/// Row storage of a [`Dataset`].
#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    /// Row-major `N x D` values.
    Dense(Vec<f64>),
    Sparse(Vec<SparseRow>),
}

/// Borrowed view of one object's feature vector.
#[derive(Debug, Clone, Copy)]
pub enum Row<'a> {
    Dense(&'a [f64]),
    Sparse(&'a SparseRow),
}

impl<'a> Row<'a> {
    pub fn sq_norm(&self) -> f64 {
        match self {
            Row::Dense(x) => x.iter().map(|v| v * v).sum(),
            Row::Sparse(r) => r.values.iter().map(|v| v * v).sum(),
        }
    }

    /// Number of features the row claims to span (dense length, or one past
    /// the largest sparse index).
    pub fn extent(&self) -> usize {
        match self {
            Row::Dense(x) => x.len(),
            Row::Sparse(r) => r.indices.last().map_or(0, |&i| i as usize + 1),
        }
    }

    pub fn dot(&self, other: &Row<'_>) -> f64 {
        match (self, other) {
            (Row::Dense(a), Row::Dense(b)) => a.iter().zip(b.iter()).map(|(x, y)| x * y).sum(),
            (Row::Dense(d), Row::Sparse(s)) | (Row::Sparse(s), Row::Dense(d)) => s.iter().map(|(i, v)| d[i] * v).sum(),
            (Row::Sparse(a), Row::Sparse(b)) => sparse_dot(a, b),
        }
    }

    /// Densifies the row into a vector of length `d`.
    pub fn to_dense(&self, d: usize) -> Vec<f64> {
        match self {
            Row::Dense(x) => x.to_vec(),
            Row::Sparse(r) => {
                let mut out = vec![0.0; d];
                for (i, v) in r.iter() {
                    out[i] = v;
                }
                out
            }
        }
    }
}

fn sparse_dot(a: &SparseRow, b: &SparseRow) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.indices.len() && j < b.indices.len() {
        match a.indices[i].cmp(&b.indices[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                acc += a.values[i] * b.values[j];
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Squared Euclidean distance between two dense vectors of equal length.
#[inline]
pub fn sq_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Squared Euclidean distance between two rows of the same dataset.
pub fn sq_dist(a: &Row<'_>, b: &Row<'_>) -> f64 {
    match (a, b) {
        (Row::Dense(x), Row::Dense(y)) => sq_euclidean(x, y),
        (Row::Sparse(x), Row::Sparse(y)) => {
            let (mut i, mut j, mut acc) = (0, 0, 0.0);
            while i < x.indices.len() || j < y.indices.len() {
                let xi = x.indices.get(i).copied().unwrap_or(u32::MAX);
                let yj = y.indices.get(j).copied().unwrap_or(u32::MAX);
                let d = if xi == yj {
                    let d = x.values[i] - y.values[j];
                    i += 1;
                    j += 1;
                    d
                } else if xi < yj {
                    i += 1;
                    x.values[i - 1]
                } else {
                    j += 1;
                    y.values[j - 1]
                };
                acc += d * d;
            }
            acc
        }
        (Row::Dense(d), Row::Sparse(s)) | (Row::Sparse(s), Row::Dense(d)) => {
            let mut acc: f64 = d.iter().map(|v| v * v).sum();
            for (i, v) in s.iter() {
                let diff = d[i] - v;
                acc += diff * diff - d[i] * d[i];
            }
            acc.max(0.0)
        }
    }
}

/// An invariant violated by a [`Dataset`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    TooFewObjects(usize),
    NoFeatures,
    UnsortedSparseIndices { row: usize },
    SparseIndexOutOfRange { row: usize, index: usize },
    NonFiniteValue { row: usize },
    LabelCount { expected: usize, actual: usize },
    KnownOutlierOutOfRange(usize),
    KnownOutlierNotLabelled(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewObjects(n) => write!(f, "N ≥ 2 required (got {n})"),
            Violation::NoFeatures => f.write_str("D ≥ 1 required"),
            Violation::UnsortedSparseIndices { row } => {
                write!(f, "unsorted sparse indices in row {row}")
            }
            Violation::SparseIndexOutOfRange { row, index } => {
                write!(f, "sparse index {index} out of range in row {row}")
            }
            Violation::NonFiniteValue { row } => write!(f, "non-finite value in row {row}"),
            Violation::LabelCount { expected, actual } => {
                write!(f, "expected {expected} labels, got {actual}")
            }
            Violation::KnownOutlierOutOfRange(i) => {
                write!(f, "known outlier index {i} out of range")
            }
            Violation::KnownOutlierNotLabelled(i) => {
                write!(f, "known outlier {i} is labelled as an inlier")
            }
        }
    }
}

/// `N` objects with `D` features, optional ground truth and optional indices
/// of outliers known in advance.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_objects: usize,
    n_features: usize,
    storage: Storage,
    labels: Option<Vec<Label>>,
    known_outliers: Option<Vec<usize>>,
}

impl Dataset {
    /// Wraps row-major values. Only the buffer length is checked here; use
    /// [`Dataset::validate`] for the remaining invariants.
    pub fn from_dense(n_objects: usize, n_features: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_objects * n_features {
            return Err(Error::LengthMismatch("dense values must hold N x D entries"));
        }
        Ok(Self {
            n_objects,
            n_features,
            storage: Storage::Dense(values),
            labels: None,
            known_outliers: None,
        })
    }

    pub fn from_sparse(n_features: usize, rows: Vec<SparseRow>) -> Self {
        Self {
            n_objects: rows.len(),
            n_features,
            storage: Storage::Sparse(rows),
            labels: None,
            known_outliers: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<Label>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn with_known_outliers(mut self, known: Vec<usize>) -> Self {
        self.known_outliers = Some(known);
        self
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn known_outliers(&self) -> Option<&[usize]> {
        self.known_outliers.as_deref()
    }

    /// Row-major values when stored densely.
    pub fn dense_values(&self) -> Option<&[f64]> {
        match &self.storage {
            Storage::Dense(v) => Some(v),
            Storage::Sparse(_) => None,
        }
    }

    pub fn row(&self, i: usize) -> Row<'_> {
        match &self.storage {
            Storage::Dense(v) => Row::Dense(&v[i * self.n_features..(i + 1) * self.n_features]),
            Storage::Sparse(rows) => Row::Sparse(&rows[i]),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = Row<'_>> + '_ {
        (0..self.n_objects).map(move |i| self.row(i))
    }

    pub fn sq_norms(&self) -> Vec<f64> {
        self.rows().map(|r| r.sq_norm()).collect()
    }

    /// Lists every violated invariant. An empty list means the dataset is
    /// valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n_objects < 2 {
            out.push(Violation::TooFewObjects(self.n_objects));
        }
        if self.n_features == 0 {
            out.push(Violation::NoFeatures);
        }
        match &self.storage {
            Storage::Dense(values) => {
                if self.n_features > 0 {
                    for (row, chunk) in values.chunks(self.n_features).enumerate() {
                        if chunk.iter().any(|v| !v.is_finite()) {
                            out.push(Violation::NonFiniteValue { row });
                        }
                    }
                }
            }
            Storage::Sparse(rows) => {
                for (row, r) in rows.iter().enumerate() {
                    if r.indices.windows(2).any(|w| w[0] >= w[1]) {
                        out.push(Violation::UnsortedSparseIndices { row });
                    }
                    if let Some(&index) = r.indices.iter().find(|&&i| i as usize >= self.n_features) {
                        out.push(Violation::SparseIndexOutOfRange {
                            row,
                            index: index as usize,
                        });
                    }
                    if r.values.iter().any(|v| !v.is_finite()) {
                        out.push(Violation::NonFiniteValue { row });
                    }
                }
            }
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.n_objects {
                out.push(Violation::LabelCount {
                    expected: self.n_objects,
                    actual: labels.len(),
                });
            }
        }
        if let Some(known) = &self.known_outliers {
            for &i in known {
                if i >= self.n_objects {
                    out.push(Violation::KnownOutlierOutOfRange(i));
                } else if let Some(labels) = &self.labels {
                    if labels.get(i) == Some(&Label::Inlier) {
                        out.push(Violation::KnownOutlierNotLabelled(i));
                    }
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidDataset(violations))
        }
    }

    /// Dense copy of the dataset (labels and known outliers carried over).
    pub fn to_dense(&self) -> Self {
        let values = match &self.storage {
            Storage::Dense(v) => v.clone(),
            Storage::Sparse(rows) => {
                let mut v = vec![0.0; self.n_objects * self.n_features];
                for (r, row) in rows.iter().enumerate() {
                    for (i, x) in row.iter() {
                        v[r * self.n_features + i] = x;
                    }
                }
                v
            }
        };
        Self {
            storage: Storage::Dense(values),
            ..self.clone_meta()
        }
    }

    /// Sparse copy of the dataset. Exact zeros are dropped.
    pub fn to_sparse(&self) -> Self {
        let rows = match &self.storage {
            Storage::Sparse(rows) => rows.clone(),
            Storage::Dense(v) => v
                .chunks(self.n_features.max(1))
                .take(self.n_objects)
                .map(|chunk| {
                    let mut row = SparseRow::default();
                    for (i, &x) in chunk.iter().enumerate() {
                        if x != 0.0 {
                            row.indices.push(i as u32);
                            row.values.push(x);
                        }
                    }
                    row
                })
                .collect(),
        };
        Self {
            storage: Storage::Sparse(rows),
            ..self.clone_meta()
        }
    }

    /// New dataset holding the given rows in the given order. Known outliers
    /// that survive the selection are re-indexed.
    pub fn select(&self, indices: &[usize]) -> Self {
        let storage = match &self.storage {
            Storage::Dense(_) => {
                let mut v = Vec::with_capacity(indices.len() * self.n_features);
                for &i in indices {
                    if let Row::Dense(x) = self.row(i) {
                        v.extend_from_slice(x);
                    }
                }
                Storage::Dense(v)
            }
            Storage::Sparse(rows) => Storage::Sparse(indices.iter().map(|&i| rows[i].clone()).collect()),
        };
        let labels = self.labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect());
        let known_outliers = self.known_outliers.as_ref().map(|known| {
            indices
                .iter()
                .enumerate()
                .filter(|(_, i)| known.contains(i))
                .map(|(pos, _)| pos)
                .collect()
        });
        Self {
            n_objects: indices.len(),
            n_features: self.n_features,
            storage,
            labels,
            known_outliers,
        }
    }

    fn clone_meta(&self) -> Self {
        Self {
            n_objects: self.n_objects,
            n_features: self.n_features,
            storage: Storage::Dense(Vec::new()),
            labels: self.labels.clone(),
            known_outliers: self.known_outliers.clone(),
        }
    }
}

/// Per-object outlierness (higher is more outlying) with its population
/// moments.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierScores {
    scores: Vec<f64>,
    mean: f64,
    std: f64,
}

impl OutlierScores {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::LengthMismatch("score vector is empty"));
        }
        if let Some(i) = scores.iter().position(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidScore(i));
        }
        let (mean, std) = population_moments(&scores);
        Ok(Self { scores, mean, std })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.scores
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.scores
    }

    pub fn get(&self, i: usize) -> f64 {
        self.scores[i]
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population (divide-by-N) standard deviation.
    pub fn std(&self) -> f64 {
        self.std
    }
}

/// Mean and population standard deviation, two-pass.
pub fn population_moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

/// Disjoint outlier (`O`) and inlier (`I`) candidate index sets covering
/// `0..N`. Both lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSets {
    outliers: Vec<usize>,
    inliers: Vec<usize>,
}

impl CandidateSets {
    pub fn from_mask(is_outlier: &[bool]) -> Self {
        let mut outliers = Vec::new();
        let mut inliers = Vec::new();
        for (i, &o) in is_outlier.iter().enumerate() {
            if o {
                outliers.push(i);
            } else {
                inliers.push(i);
            }
        }
        Self { outliers, inliers }
    }

    /// Builds the partition of `0..n` whose outlier side is `outliers`.
    pub fn from_outliers(n: usize, outliers: &[usize]) -> Result<Self> {
        let mut mask = vec![false; n];
        for &i in outliers {
            if i >= n {
                return Err(Error::LengthMismatch("outlier candidate index out of range"));
            }
            mask[i] = true;
        }
        Ok(Self::from_mask(&mask))
    }

    pub fn outliers(&self) -> &[usize] {
        &self.outliers
    }

    pub fn inliers(&self) -> &[usize] {
        &self.inliers
    }

    pub fn len(&self) -> usize {
        self.outliers.len() + self.inliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A training triplet: query objects, a positive (inlier) example and a
/// negative (outlier) example, all given as dataset indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triplet {
    pub query: Vec<usize>,
    pub positive: usize,
    pub negative: usize,
}

/// Pipeline hyperparameters. [`Default`] gives the reference settings.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    /// Objects per Sp subsample.
    pub subsample_size: usize,
    /// Number of Sp subsamples averaged.
    pub ensemble_size: usize,
    /// Cantelli threshold multiplier.
    pub alpha: f64,
    /// Representation dimension `M`.
    pub rep_dim: usize,
    /// Query objects per triplet.
    pub query_size: usize,
    /// Hinge margin.
    pub margin: f64,
    pub n_epochs: usize,
    pub batch_size: usize,
    pub samples_per_epoch: usize,
    /// ADADELTA decay rate.
    pub optimizer_decay: f64,
    /// ADADELTA conditioning constant.
    pub optimizer_eps: f64,
    /// Fraction of each batch's negatives drawn from labelled outliers, when
    /// any are supplied.
    pub labeled_ratio: f64,
    pub rng_seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            subsample_size: 8,
            ensemble_size: 50,
            alpha: 1.732,
            rep_dim: 20,
            query_size: 1,
            margin: 1000.0,
            n_epochs: 30,
            batch_size: 256,
            samples_per_epoch: 5000,
            optimizer_decay: 0.95,
            optimizer_eps: 1e-6,
            labeled_ratio: 0.5,
            rng_seed: 0,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason| Err(Error::InvalidParameter { field, reason });
        if self.subsample_size < 1 {
            return bad("subsample_size", "subsample_size ≥ 1");
        }
        if self.ensemble_size < 1 {
            return bad("ensemble_size", "ensemble_size ≥ 1");
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return bad("alpha", "alpha ≥ 0");
        }
        if self.rep_dim < 1 {
            return bad("rep_dim", "rep_dim ≥ 1");
        }
        if self.query_size < 1 {
            return bad("query_size", "query_size ≥ 1");
        }
        if !self.margin.is_finite() || self.margin <= 0.0 {
            return bad("margin", "margin > 0");
        }
        if self.batch_size < 1 {
            return bad("batch_size", "batch_size ≥ 1");
        }
        if self.samples_per_epoch < 1 {
            return bad("samples_per_epoch", "samples_per_epoch ≥ 1");
        }
        if !(self.optimizer_decay > 0.0 && self.optimizer_decay < 1.0) {
            return bad("optimizer_decay", "0 < optimizer_decay < 1");
        }
        if !self.optimizer_eps.is_finite() || self.optimizer_eps <= 0.0 {
            return bad("optimizer_eps", "optimizer_eps > 0");
        }
        if !(0.0..=1.0).contains(&self.labeled_ratio) {
            return bad("labeled_ratio", "0 ≤ labeled_ratio ≤ 1");
        }
        Ok(())
    }

    /// Optimisation steps per epoch.
    pub fn batches_per_epoch(&self) -> usize {
        (self.samples_per_epoch / self.batch_size).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valid_dense_has_no_violations() {
        let ds = Dataset::from_dense(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!(ds.validate().is_empty());
    }

    #[test]
    fn unsorted_sparse_row_is_reported() {
        let row = SparseRow::new(vec![5, 3], vec![1.0, 1.0]).unwrap();
        let ds = Dataset::from_sparse(10, vec![row, SparseRow::default()]);
        let v = ds.validate();
        assert_eq!(v, vec![Violation::UnsortedSparseIndices { row: 0 }]);
        assert!(alloc::format!("{}", v[0]).starts_with("unsorted sparse indices"));
    }

    #[test]
    fn single_object_is_reported() {
        let ds = Dataset::from_dense(1, 2, vec![0.0, 0.0]).unwrap();
        let v = ds.validate();
        assert_eq!(v, vec![Violation::TooFewObjects(1)]);
        assert!(alloc::format!("{}", v[0]).starts_with("N ≥ 2 required"));
    }

    #[test]
    fn known_outliers_checked_against_labels() {
        let ds = Dataset::from_dense(2, 1, vec![0.0, 1.0])
            .unwrap()
            .with_labels(vec![Label::Inlier, Label::Outlier])
            .with_known_outliers(vec![0, 1, 5]);
        assert_eq!(
            ds.validate(),
            vec![
                Violation::KnownOutlierNotLabelled(0),
                Violation::KnownOutlierOutOfRange(5)
            ]
        );
    }

    #[test]
    fn sparse_index_bound_and_non_finite() {
        let ds = Dataset::from_sparse(
            4,
            vec![
                SparseRow::new(vec![1, 4], vec![1.0, 1.0]).unwrap(),
                SparseRow::new(vec![0], vec![f64::NAN]).unwrap(),
            ],
        );
        assert_eq!(
            ds.validate(),
            vec![
                Violation::SparseIndexOutOfRange { row: 0, index: 4 },
                Violation::NonFiniteValue { row: 1 }
            ]
        );
    }

    #[test]
    fn scores_moments() {
        let s = OutlierScores::new(vec![1.0, 1.0, 1.0, 1.0, 9.0]).unwrap();
        assert!((s.mean() - 2.6).abs() < 1e-12);
        assert!((s.std() - 3.2).abs() < 1e-12);
        assert!(OutlierScores::new(vec![1.0, -0.5]).is_err());
        assert!(OutlierScores::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn select_reindexes_known_outliers() {
        let ds = Dataset::from_dense(4, 1, vec![0.0, 1.0, 2.0, 3.0])
            .unwrap()
            .with_known_outliers(vec![1, 3]);
        let sub = ds.select(&[3, 2]);
        assert_eq!(sub.known_outliers(), Some(&[0][..]));
        assert_eq!(sub.dense_values(), Some(&[3.0, 2.0][..]));
    }

    #[test]
    fn default_params_are_valid_and_zero_rep_dim_is_named() {
        HyperParams::default().validate().unwrap();
        let p = HyperParams {
            rep_dim: 0,
            ..Default::default()
        };
        assert_eq!(
            p.validate(),
            Err(Error::InvalidParameter {
                field: "rep_dim",
                reason: "rep_dim ≥ 1"
            })
        );
        assert_eq!(HyperParams::default().batches_per_epoch(), 19);
    }

    #[test]
    fn mixed_distance_matches_dense() {
        let dense = [1.0, -2.0, 0.0, 4.0];
        let sparse = SparseRow::new(vec![1, 2], vec![3.0, -1.0]).unwrap();
        let sparse_dense = Row::Sparse(&sparse).to_dense(4);
        let expect = sq_euclidean(&dense, &sparse_dense);
        assert!((sq_dist(&Row::Dense(&dense), &Row::Sparse(&sparse)) - expect).abs() < 1e-12);
        let other = SparseRow::new(vec![0, 2], vec![1.0, 2.0]).unwrap();
        let other_dense = Row::Sparse(&other).to_dense(4);
        assert!(
            (sq_dist(&Row::Sparse(&sparse), &Row::Sparse(&other)) - sq_euclidean(&sparse_dense, &other_dense)).abs()
                < 1e-12
        );
        assert_eq!(Row::Sparse(&sparse).dot(&Row::Sparse(&other)), -2.0);
    }

    proptest! {
        #[test]
        fn dense_sparse_round_trip(
            n in 2usize..8,
            d in 1usize..8,
            seed in proptest::collection::vec(-3i32..3, 64),
        ) {
            let values: Vec<f64> = (0..n * d).map(|k| seed[k % seed.len()] as f64 * 0.5).collect();
            let ds = Dataset::from_dense(n, d, values).unwrap();
            let back = ds.to_sparse().to_dense();
            prop_assert_eq!(back, ds);
        }

        #[test]
        fn stored_moments_match_recomputation(xs in proptest::collection::vec(0.0f64..1e6, 1..200)) {
            let s = OutlierScores::new(xs.clone()).unwrap();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
            prop_assert!(rel(s.mean(), mean) <= 1e-9 || (s.mean() - mean).abs() < 1e-12);
            prop_assert!(rel(s.std(), var.sqrt()) <= 1e-9 || (s.std() - var.sqrt()).abs() < 1e-9);
        }
    }
}
