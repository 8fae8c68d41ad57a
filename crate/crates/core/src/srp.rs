//! Sparse random projection baseline.
//!
//! Entries of the `D x m` projection matrix are `+√(s/m)` and `-√(s/m)` with
//! probability `1/(2s)` each and zero otherwise, with `s = 1 / density`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::data::{Dataset, Row};
use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

/// The usual `1/√D` density.
pub fn default_density(n_features: usize) -> f64 {
    1.0 / libm::sqrt(n_features.max(1) as f64)
}

/// Row-major `D x m` projection matrix.
pub fn srp_matrix(n_features: usize, m: usize, density: f64, seed: u64) -> Result<Vec<f64>> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidParameter {
            field: "density",
            reason: "0 < density ≤ 1",
        });
    }
    if m < 1 {
        return Err(Error::InvalidParameter {
            field: "m",
            reason: "m ≥ 1",
        });
    }
    let s = 1.0 / density;
    let scale = libm::sqrt(s / m as f64);
    let half = density / 2.0;
    let mut rng = rng::stream(seed, Purpose::Projection, 0);
    Ok((0..n_features * m)
        .map(|_| {
            let u: f64 = rng.random();
            if u < half {
                scale
            } else if u < density {
                -scale
            } else {
                0.0
            }
        })
        .collect())
}

/// Projects every object to `m` dimensions. The result is dense and keeps
/// the input's labels.
pub fn srp_project(dataset: &Dataset, m: usize, density: f64, seed: u64) -> Result<Dataset> {
    let d = dataset.n_features();
    let r = srp_matrix(d, m, density, seed)?;
    let mut values = vec![0.0; dataset.n_objects() * m];
    for (row, out) in dataset.rows().zip(values.chunks_exact_mut(m)) {
        match row {
            Row::Dense(x) => {
                for (xd, w) in x.iter().zip(r.chunks_exact(m)) {
                    for (o, wk) in out.iter_mut().zip(w) {
                        *o += xd * wk;
                    }
                }
            }
            Row::Sparse(x) => {
                for (i, xd) in x.iter() {
                    for (o, wk) in out.iter_mut().zip(&r[i * m..(i + 1) * m]) {
                        *o += xd * wk;
                    }
                }
            }
        }
    }
    let mut out = Dataset::from_dense(dataset.n_objects(), m, values)?;
    if let Some(labels) = dataset.labels() {
        out = out.with_labels(labels.to_vec());
    }
    Ok(out)
}
