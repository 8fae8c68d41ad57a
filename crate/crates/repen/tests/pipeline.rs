use repen::pipeline::{self, sp_config};
use repen::synth::synth_gaussian_with_outliers;
use repen_core::learner::{train, transform};
use repen_core::sp::{sp_score, sp_score_embedded};
use repen_core::threshold::candidate_sets;
use repen_core::{Backend, Dataset, HyperParams, RepresentationModel, SpConfig};

fn quick(seed: u64) -> HyperParams {
    HyperParams {
        n_epochs: 3,
        samples_per_epoch: 1024,
        rng_seed: seed,
        ..Default::default()
    }
}

#[test]
fn outliers_score_higher_in_original_space() {
    let ds = synth_gaussian_with_outliers(200, 10, 5, 0, 8.0, 4).unwrap();
    let scores = sp_score(&ds, &SpConfig::default()).unwrap();
    let labels = ds.labels().unwrap();
    let mean = |want: bool| {
        let v: Vec<f64> = (0..ds.n_objects())
            .filter(|&i| labels[i].is_outlier() == want)
            .map(|i| scores.get(i))
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    assert!(mean(true) > mean(false));
}

#[test]
fn training_reduces_batch_loss() {
    let ds = synth_gaussian_with_outliers(500, 25, 5, 495, 8.0, 7).unwrap();
    let params = HyperParams::default();
    let scores = sp_score(&ds, &sp_config(&params, Backend::KdTree)).unwrap();
    let (sets, _) = candidate_sets(&scores, params.alpha).unwrap();
    let (_, report) = train(&ds, &sets, &scores, &params, None).unwrap();
    assert!(report.final_loss < report.initial_loss, "{report:?}");
}

#[test]
fn embedded_scoring_equals_transform_then_score() {
    let ds = synth_gaussian_with_outliers(150, 8, 4, 16, 5.0, 2).unwrap();
    let model = RepresentationModel::random(20, 6, 3).unwrap();
    for backend in [Backend::BruteForce, Backend::KdTree] {
        let cfg = SpConfig {
            backend,
            seed: 9,
            ..Default::default()
        };
        let direct = sp_score(&transform(&model, &ds).unwrap(), &cfg).unwrap();
        assert_eq!(sp_score_embedded(&ds, &model, &cfg).unwrap(), direct);
    }
}

#[test]
fn identity_model_on_nonnegative_data_keeps_scores() {
    let ds = synth_gaussian_with_outliers(100, 5, 3, 2, 4.0, 8).unwrap();
    let shifted: Vec<f64> = ds.dense_values().unwrap().iter().map(|v| v.abs()).collect();
    let ds = Dataset::from_dense(ds.n_objects(), ds.n_features(), shifted).unwrap();
    let cfg = SpConfig::default();
    let identity = RepresentationModel::identity(ds.n_features()).unwrap();
    assert_eq!(transform(&identity, &ds).unwrap().dense_values(), ds.dense_values());
    assert_eq!(
        sp_score_embedded(&ds, &identity, &cfg).unwrap(),
        sp_score(&ds, &cfg).unwrap()
    );
}

#[test]
fn pipeline_is_reproducible_and_thread_invariant() {
    let ds = synth_gaussian_with_outliers(200, 8, 4, 36, 6.0, 5).unwrap();
    let a = pipeline::run(&ds, &quick(1), None, 1).unwrap();
    let b = pipeline::run(&ds, &quick(1), None, 2).unwrap();
    assert_eq!(a.model, b.model);
    assert_eq!(a.scores, b.scores);
    assert_eq!(a.embedded.n_features(), 20);
    let c = pipeline::run(&ds, &quick(2), None, 1).unwrap();
    assert_ne!(a.model, c.model);
    let (_, detected) = pipeline::detect(&a.model, &ds, &quick(1), 1).unwrap();
    assert_eq!(detected, a.scores);
}

#[test]
fn labelled_outliers_flow_through_the_pipeline() {
    let ds = synth_gaussian_with_outliers(200, 8, 4, 36, 6.0, 5).unwrap();
    let out = pipeline::run(&ds, &quick(3), Some(&[200, 201]), 1).unwrap();
    assert_eq!(out.scores.len(), 208);
    assert!(pipeline::run(&ds, &quick(3), Some(&[999]), 1).is_err());
}
