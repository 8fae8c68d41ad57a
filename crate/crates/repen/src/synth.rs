//! Synthetic Gaussian data with planted outliers, and class downsampling.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use repen_core::{Dataset, Label};

use crate::{Error, Result};

/// Inliers are standard Gaussian in the first `d_relevant` features. Outliers
/// are standard Gaussian shifted by `separation` along one random unit
/// direction of that subspace. Every object gets `d_noise` further
/// standard-Gaussian features. Inliers come first, then outliers.
pub fn synth_gaussian_with_outliers(
    n_inliers: usize,
    n_outliers: usize,
    d_relevant: usize,
    d_noise: usize,
    separation: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_inliers < 1 {
        return Err(Error::invalid("n_inliers", "must be ≥ 1"));
    }
    if d_relevant < 1 {
        return Err(Error::invalid("d_relevant", "must be ≥ 1"));
    }
    if !separation.is_finite() || separation <= 0.0 {
        return Err(Error::invalid("separation", "must be > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direction = loop {
        let u: Vec<f64> = (0..d_relevant).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            break u.into_iter().map(|x| x / norm).collect::<Vec<_>>();
        }
    };
    let n = n_inliers + n_outliers;
    let d = d_relevant + d_noise;
    let mut values = Vec::with_capacity(n * d);
    for i in 0..n {
        let shift = if i >= n_inliers { separation } else { 0.0 };
        for u in &direction {
            let z: f64 = StandardNormal.sample(&mut rng);
            values.push(z + shift * u);
        }
        values.extend((0..d_noise).map(|_| -> f64 { StandardNormal.sample(&mut rng) }));
    }
    let labels = (0..n)
        .map(|i| if i < n_inliers { Label::Inlier } else { Label::Outlier })
        .collect();
    Ok(Dataset::from_dense(n, d, values)?.with_labels(labels))
}

/// Result of [`downsample`]: rows kept in the dataset, and outlier rows left
/// out (usable as a labelled-outlier pool). Both in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Downsampled {
    pub kept: Vec<usize>,
    pub held_out: Vec<usize>,
}

/// Keeps every inlier and a random subset of outliers so that outliers make
/// up `rate` of the kept rows (at least one outlier is kept).
pub fn downsample(dataset: &Dataset, rate: f64, seed: u64) -> Result<Downsampled> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::invalid("rate", "must be in (0, 1)"));
    }
    let labels = dataset
        .labels()
        .ok_or_else(|| Error::invalid("labels", "downsampling needs labels"))?;
    let outliers: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_outlier()).collect();
    let inliers: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i].is_outlier()).collect();
    if outliers.is_empty() || inliers.is_empty() {
        return Err(repen_core::Error::SingleClass.into());
    }
    let target = (rate * inliers.len() as f64 / (1.0 - rate)).round() as usize;
    let keep = target.clamp(1, outliers.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<usize> = sample(&mut rng, outliers.len(), keep)
        .into_iter()
        .map(|k| outliers[k])
        .collect();
    chosen.sort_unstable();
    let held_out = outliers
        .iter()
        .copied()
        .filter(|i| chosen.binary_search(i).is_err())
        .collect();
    let mut kept: Vec<usize> = inliers.into_iter().chain(chosen).collect();
    kept.sort_unstable();
    Ok(Downsampled { kept, held_out })
}
