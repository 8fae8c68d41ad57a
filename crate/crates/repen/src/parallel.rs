//! Multi-threaded ensemble scoring.
//!
//! Members are scored on a rayon pool and summed in member order, so the
//! result is bit-identical to the single-threaded path for any thread count.

use rayon::prelude::*;
use repen_core::sp::{draw_subsamples, mean_scores, Scorer};
use repen_core::{Dataset, OutlierScores, SpConfig};

use crate::Result;

/// Environment variable holding the default thread count.
pub const THREADS_ENV: &str = "REPEN_THREADS";

/// Thread count from [`THREADS_ENV`], else 1.
pub fn default_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n >= 1)
        .unwrap_or(1)
}

pub fn sp_score(dataset: &Dataset, config: &SpConfig, threads: usize) -> Result<OutlierScores> {
    if threads <= 1 {
        return Ok(repen_core::sp::sp_score(dataset, config)?);
    }
    dataset.ensure_valid()?;
    let subsamples = draw_subsamples(dataset.n_objects(), config)?;
    let scorer = Scorer::new(dataset, config.backend);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    let members: Vec<_> = pool.install(|| {
        subsamples
            .par_iter()
            .map(|s| scorer.member_distances(s))
            .collect::<std::result::Result<Vec<_>, _>>()
    })?;
    let mut sums = vec![0.0; dataset.n_objects()];
    for m in members {
        for (acc, d) in sums.iter_mut().zip(m) {
            *acc += d;
        }
    }
    Ok(mean_scores(sums, subsamples.len())?)
}
