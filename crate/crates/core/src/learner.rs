//! Single-layer ReLU representation learned with a triplet ranking loss.
//!
//! The model maps `x ∈ R^D` to `f(x)_k = max(0, w_kᵀx)` for `k < M`. The
//! weights are stored as a `D x M` row-major matrix, so row `d` holds the
//! contributions of feature `d` to every output; sparse inputs touch only
//! the rows of their non-zero features.
//!
//! For a triplet `(Q, x⁺, x⁻)` the loss is
//! `max(0, c + nn(f(x⁺) | f(Q)) - nn(f(x⁻) | f(Q)))`, where `nn` is the
//! smallest squared Euclidean distance to an embedded query object.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::data::{sq_euclidean, CandidateSets, Dataset, HyperParams, OutlierScores, Row, Triplet};
use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::sampler::TripletSampler;

/// Weights of the representation function.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationModel {
    n_features: usize,
    rep_dim: usize,
    weights: Vec<f64>,
}

impl RepresentationModel {
    /// `weights` is the `D x M` matrix in row-major order.
    pub fn new(n_features: usize, rep_dim: usize, weights: Vec<f64>) -> Result<Self> {
        if rep_dim < 1 {
            return Err(Error::InvalidParameter {
                field: "rep_dim",
                reason: "rep_dim ≥ 1",
            });
        }
        if rep_dim > n_features {
            return Err(Error::InvalidParameter {
                field: "rep_dim",
                reason: "rep_dim must not exceed the number of features",
            });
        }
        if weights.len() != n_features * rep_dim {
            return Err(Error::LengthMismatch("weights must hold D x M entries"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "weights",
                reason: "weights must be finite",
            });
        }
        Ok(Self {
            n_features,
            rep_dim,
            weights,
        })
    }

    pub fn zeros(n_features: usize, rep_dim: usize) -> Result<Self> {
        Self::new(n_features, rep_dim, vec![0.0; n_features * rep_dim])
    }

    /// `M = D` identity map. On non-negative inputs it reproduces the input.
    pub fn identity(n_features: usize) -> Result<Self> {
        let mut w = vec![0.0; n_features * n_features];
        for d in 0..n_features {
            w[d * n_features + d] = 1.0;
        }
        Self::new(n_features, n_features, w)
    }

    /// Uniform weights on `(-√(6/(D+M)), √(6/(D+M)))` from the run seed.
    pub fn random(n_features: usize, rep_dim: usize, seed: u64) -> Result<Self> {
        let limit = libm::sqrt(6.0 / (n_features + rep_dim) as f64);
        let mut rng = rng::stream(seed, Purpose::WeightInit, 0);
        let w = (0..n_features * rep_dim)
            .map(|_| rng.random_range(-limit..limit))
            .collect();
        Self::new(n_features, rep_dim, w)
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn rep_dim(&self) -> usize {
        self.rep_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of feature `d` on output `k`.
    pub fn weight(&self, d: usize, k: usize) -> f64 {
        self.weights[d * self.rep_dim + k]
    }

    fn check_row(&self, x: &Row<'_>) -> Result<()> {
        let ok = match x {
            Row::Dense(v) => v.len() == self.n_features,
            Row::Sparse(_) => x.extent() <= self.n_features,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: x.extent(),
            })
        }
    }

    /// Writes `w_kᵀx` for every `k` into `out`. The row must already be
    /// checked.
    fn pre_activations_into(&self, x: &Row<'_>, out: &mut [f64]) {
        out.fill(0.0);
        let m = self.rep_dim;
        match x {
            Row::Dense(v) => {
                for (xd, w) in v.iter().zip(self.weights.chunks_exact(m)) {
                    for (o, wk) in out.iter_mut().zip(w) {
                        *o += xd * wk;
                    }
                }
            }
            Row::Sparse(r) => {
                for (d, xd) in r.iter() {
                    let w = &self.weights[d * m..(d + 1) * m];
                    for (o, wk) in out.iter_mut().zip(w) {
                        *o += xd * wk;
                    }
                }
            }
        }
    }

    pub fn pre_activations(&self, x: &Row<'_>) -> Result<Vec<f64>> {
        self.check_row(x)?;
        let mut out = vec![0.0; self.rep_dim];
        self.pre_activations_into(x, &mut out);
        Ok(out)
    }

    pub fn embed(&self, x: &Row<'_>) -> Result<Vec<f64>> {
        let mut z = self.pre_activations(x)?;
        relu(&mut z);
        Ok(z)
    }
}

fn relu(z: &mut [f64]) {
    for v in z.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// `f(x)` for one input vector.
pub fn embed(model: &RepresentationModel, x: &Row<'_>) -> Result<Vec<f64>> {
    model.embed(x)
}

/// Maps every object into the representation space. The result is a dense
/// `N x M` dataset carrying the input's labels and known outliers.
pub fn transform(model: &RepresentationModel, dataset: &Dataset) -> Result<Dataset> {
    if dataset.n_features() != model.n_features {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            actual: dataset.n_features(),
        });
    }
    let m = model.rep_dim;
    let mut values = vec![0.0; dataset.n_objects() * m];
    for (row, out) in dataset.rows().zip(values.chunks_exact_mut(m)) {
        model.check_row(&row)?;
        model.pre_activations_into(&row, out);
        relu(out);
    }
    let mut out = Dataset::from_dense(dataset.n_objects(), m, values)?;
    if let Some(labels) = dataset.labels() {
        out = out.with_labels(labels.to_vec());
    }
    if let Some(known) = dataset.known_outliers() {
        out = out.with_known_outliers(known.to_vec());
    }
    Ok(out)
}

/// Hinge ranking loss on already-embedded vectors, without any self-match
/// exclusion.
pub fn hinge_loss(query: &[&[f64]], positive: &[f64], negative: &[f64], margin: f64) -> f64 {
    let nn = |x: &[f64]| query.iter().map(|q| sq_euclidean(x, q)).fold(f64::INFINITY, f64::min);
    let loss = margin + nn(positive) - nn(negative);
    if loss > 0.0 {
        loss
    } else {
        0.0
    }
}

/// Pre- and post-activation of one embedded object.
struct Embedded {
    pre: Vec<f64>,
    post: Vec<f64>,
}

impl Embedded {
    fn of(model: &RepresentationModel, x: &Row<'_>) -> Self {
        let mut pre = vec![0.0; model.rep_dim];
        model.pre_activations_into(x, &mut pre);
        let mut post = pre.clone();
        relu(&mut post);
        Self { pre, post }
    }
}

/// Position in the query list of the nearest member to `x`, skipping members
/// that are the same object as `x`. Ties go to the lowest position.
fn nearest_query(query: &[usize], embedded: &[Embedded], id: usize, x: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (pos, (&qid, q)) in query.iter().zip(embedded).enumerate() {
        if qid == id {
            continue;
        }
        let d = sq_euclidean(x, &q.post);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((pos, d));
        }
    }
    best
}

/// Adds `scale · x ⊗ (g ⊙ 1[pre > 0])` to `grad`.
fn scatter(model: &RepresentationModel, x: &Row<'_>, pre: &[f64], upstream: &[f64], scale: f64, grad: &mut [f64]) {
    let m = model.rep_dim;
    let delta: Vec<f64> = pre
        .iter()
        .zip(upstream)
        .map(|(&a, &g)| if a > 0.0 { g * scale } else { 0.0 })
        .collect();
    if delta.iter().all(|&d| d == 0.0) {
        return;
    }
    match x {
        Row::Dense(v) => {
            for (xd, g) in v.iter().zip(grad.chunks_exact_mut(m)) {
                for (gk, dk) in g.iter_mut().zip(&delta) {
                    *gk += xd * dk;
                }
            }
        }
        Row::Sparse(r) => {
            for (d, xd) in r.iter() {
                for (gk, dk) in grad[d * m..(d + 1) * m].iter_mut().zip(&delta) {
                    *gk += xd * dk;
                }
            }
        }
    }
}

fn check_triplet(model: &RepresentationModel, dataset: &Dataset, t: &Triplet) -> Result<()> {
    if dataset.n_features() != model.n_features {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            actual: dataset.n_features(),
        });
    }
    if t.query.is_empty() {
        return Err(Error::EmptyPool("query set"));
    }
    let n = dataset.n_objects();
    if t.query.iter().chain([&t.positive, &t.negative]).any(|&i| i >= n) {
        return Err(Error::LengthMismatch("triplet index out of range"));
    }
    Ok(())
}

/// Loss of one triplet and, when `grad` is given, `scale` times its
/// subgradient added into `grad`.
fn evaluate(
    model: &RepresentationModel,
    dataset: &Dataset,
    t: &Triplet,
    margin: f64,
    grad: Option<(&mut [f64], f64)>,
) -> f64 {
    let query: Vec<Embedded> = t.query.iter().map(|&q| Embedded::of(model, &dataset.row(q))).collect();
    let pos = Embedded::of(model, &dataset.row(t.positive));
    let neg = Embedded::of(model, &dataset.row(t.negative));
    let (Some((jp, dp)), Some((jn, dn))) = (
        nearest_query(&t.query, &query, t.positive, &pos.post),
        nearest_query(&t.query, &query, t.negative, &neg.post),
    ) else {
        return 0.0;
    };
    let loss = margin + dp - dn;
    if loss <= 0.0 || loss.is_nan() {
        return 0.0;
    }
    if let Some((grad, scale)) = grad {
        let m = model.rep_dim;
        // dL/df(x⁺) = 2 (f(x⁺) - f(q⁺)),  dL/df(x⁻) = -2 (f(x⁻) - f(q⁻))
        let g_pos: Vec<f64> = (0..m).map(|k| 2.0 * (pos.post[k] - query[jp].post[k])).collect();
        let g_neg: Vec<f64> = (0..m).map(|k| -2.0 * (neg.post[k] - query[jn].post[k])).collect();
        let mut g_query = vec![vec![0.0; m]; t.query.len()];
        for k in 0..m {
            g_query[jp][k] -= g_pos[k];
            g_query[jn][k] -= g_neg[k];
        }
        scatter(model, &dataset.row(t.positive), &pos.pre, &g_pos, scale, grad);
        scatter(model, &dataset.row(t.negative), &neg.pre, &g_neg, scale, grad);
        for ((&q, e), g) in t.query.iter().zip(&query).zip(&g_query) {
            scatter(model, &dataset.row(q), &e.pre, g, scale, grad);
        }
    }
    loss
}

/// Hinge loss of a triplet of dataset objects. A query member that is the
/// same object as `x⁺` (or `x⁻`) is skipped in that side's minimum; if no
/// member is left the loss is zero.
pub fn triplet_loss(model: &RepresentationModel, dataset: &Dataset, triplet: &Triplet, margin: f64) -> Result<f64> {
    check_triplet(model, dataset, triplet)?;
    Ok(evaluate(model, dataset, triplet, margin, None))
}

/// Exact subgradient of [`triplet_loss`] with respect to the `D x M` weights.
///
/// At non-differentiable points the zero branch is taken: no gradient when
/// the loss is exactly zero, and none through a unit whose pre-activation is
/// exactly zero.
pub fn loss_gradient(
    model: &RepresentationModel,
    dataset: &Dataset,
    triplet: &Triplet,
    margin: f64,
) -> Result<Vec<f64>> {
    check_triplet(model, dataset, triplet)?;
    let mut grad = vec![0.0; model.weights.len()];
    evaluate(model, dataset, triplet, margin, Some((&mut grad, 1.0)));
    Ok(grad)
}

/// Fraction of triplets with a positive loss.
pub fn violation_rate(
    model: &RepresentationModel,
    dataset: &Dataset,
    triplets: &[Triplet],
    margin: f64,
) -> Result<f64> {
    if triplets.is_empty() {
        return Ok(0.0);
    }
    let mut violated = 0usize;
    for t in triplets {
        if triplet_loss(model, dataset, t, margin)? > 0.0 {
            violated += 1;
        }
    }
    Ok(violated as f64 / triplets.len() as f64)
}

/// ADADELTA accumulators.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub accum_grad_sq: Vec<f64>,
    pub accum_update_sq: Vec<f64>,
    pub decay: f64,
    pub eps: f64,
}

impl OptimizerState {
    pub fn new(len: usize, decay: f64, eps: f64) -> Self {
        Self {
            accum_grad_sq: vec![0.0; len],
            accum_update_sq: vec![0.0; len],
            decay,
            eps,
        }
    }

    /// One ADADELTA update of `weights` along `grad`, in place.
    pub fn step(&mut self, weights: &mut [f64], grad: &[f64]) -> Result<()> {
        if weights.len() != grad.len() || weights.len() != self.accum_grad_sq.len() {
            return Err(Error::LengthMismatch("optimizer state, weights and gradient"));
        }
        let (rho, eps) = (self.decay, self.eps);
        for (((w, &g), eg), ex) in weights
            .iter_mut()
            .zip(grad)
            .zip(self.accum_grad_sq.iter_mut())
            .zip(self.accum_update_sq.iter_mut())
        {
            *eg = rho * *eg + (1.0 - rho) * g * g;
            let update = -libm::sqrt(*ex + eps) / libm::sqrt(*eg + eps) * g;
            *ex = rho * *ex + (1.0 - rho) * update * update;
            *w += update;
        }
        Ok(())
    }
}

/// Applies one ADADELTA step to a model's weights.
pub fn adadelta_step(state: &mut OptimizerState, model: &mut RepresentationModel, grad: &[f64]) -> Result<()> {
    state.step(&mut model.weights, grad)
}

/// Summary of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean batch loss of each epoch.
    pub epoch_losses: Vec<f64>,
    /// Mean loss of the first batch, before any update. Zero when no batch
    /// ran.
    pub initial_loss: f64,
    /// Mean batch loss of the last epoch. Zero when no epoch ran.
    pub final_loss: f64,
    /// Violation rate of the initial model on held-out triplets.
    pub initial_violation_rate: f64,
    /// Violation rate of the trained model on the same triplets.
    pub violation_rate: f64,
    pub batches: usize,
}

/// Triplets used for the violation rates in [`TrainReport`].
pub const VIOLATION_SAMPLE: usize = 1024;

/// Learns the representation from candidate sets and their scores.
///
/// Runs `n_epochs` epochs of [`HyperParams::batches_per_epoch`] batches.
/// Each batch samples `batch_size` triplets, averages their subgradients and
/// takes one ADADELTA step. Batch `s` draws from its own random stream, so
/// results depend only on `params.rng_seed`.
pub fn train(
    dataset: &Dataset,
    sets: &CandidateSets,
    scores: &OutlierScores,
    params: &HyperParams,
    labeled: Option<&[usize]>,
) -> Result<(RepresentationModel, TrainReport)> {
    params.validate()?;
    dataset.ensure_valid()?;
    if sets.len() != dataset.n_objects() || scores.len() != dataset.n_objects() {
        return Err(Error::LengthMismatch(
            "candidate sets and scores must cover the dataset",
        ));
    }
    let mut model = RepresentationModel::random(dataset.n_features(), params.rep_dim, params.rng_seed)?;
    let sampler = TripletSampler::new(sets, scores, params.query_size, labeled, params.labeled_ratio)?;
    let mut state = OptimizerState::new(model.weights.len(), params.optimizer_decay, params.optimizer_eps);

    let held_out = sampler.sample_batch(
        VIOLATION_SAMPLE,
        &mut rng::stream(params.rng_seed, Purpose::Evaluation, 0),
    );
    let initial_violation_rate = violation_rate(&model, dataset, &held_out, params.margin)?;

    let b = params.batch_size;
    let per_epoch = params.batches_per_epoch();
    let mut grad = vec![0.0; model.weights.len()];
    let mut epoch_losses = Vec::with_capacity(params.n_epochs);
    let mut initial_loss = 0.0;
    let mut step = 0u64;
    for _ in 0..params.n_epochs {
        let mut epoch_total = 0.0;
        for _ in 0..per_epoch {
            let triplets = sampler.sample_batch(b, &mut rng::stream(params.rng_seed, Purpose::Batch, step));
            grad.fill(0.0);
            let mut total = 0.0;
            for t in &triplets {
                total += evaluate(&model, dataset, t, params.margin, Some((&mut grad, 1.0)));
            }
            let inv_b = 1.0 / b as f64;
            for g in grad.iter_mut() {
                *g *= inv_b;
            }
            let batch_loss = total * inv_b;
            if step == 0 {
                initial_loss = batch_loss;
            }
            state.step(&mut model.weights, &grad)?;
            epoch_total += batch_loss;
            step += 1;
        }
        epoch_losses.push(epoch_total / per_epoch as f64);
    }
    let violation_rate = violation_rate(&model, dataset, &held_out, params.margin)?;
    let final_loss = epoch_losses.last().copied().unwrap_or(0.0);
    Ok((
        model,
        TrainReport {
            epoch_losses,
            initial_loss,
            final_loss,
            initial_violation_rate,
            violation_rate,
            batches: step as usize,
        },
    ))
}
