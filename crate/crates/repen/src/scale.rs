//! Optional per-feature min-max scaling to `[0, 1]`.

use repen_core::{Dataset, Row, SparseRow, Storage};

fn feature_ranges(dataset: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let d = dataset.n_features();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    let sparse = dataset.is_sparse();
    if sparse {
        // implicit zeros count towards the range
        lo.iter_mut().for_each(|v| *v = 0.0);
        hi.iter_mut().for_each(|v| *v = 0.0);
    }
    for row in dataset.rows() {
        match row {
            Row::Dense(x) => {
                for (k, &v) in x.iter().enumerate() {
                    lo[k] = lo[k].min(v);
                    hi[k] = hi[k].max(v);
                }
            }
            Row::Sparse(r) => {
                for (k, v) in r.iter() {
                    lo[k] = lo[k].min(v);
                    hi[k] = hi[k].max(v);
                }
            }
        }
    }
    (lo, hi)
}

/// Maps every feature to `[0, 1]`; constant features become 0. Sparse data
/// stays sparse when no feature has a negative minimum, and is densified
/// otherwise.
pub fn min_max(dataset: &Dataset) -> Dataset {
    let (lo, hi) = feature_ranges(dataset);
    let f = |k: usize, v: f64| {
        let span = hi[k] - lo[k];
        if span > 0.0 {
            (v - lo[k]) / span
        } else {
            0.0
        }
    };
    let scaled = match dataset.storage() {
        Storage::Sparse(rows) if lo.iter().all(|&l| l == 0.0) => {
            let rows = rows
                .iter()
                .map(|r| SparseRow {
                    indices: r.indices.clone(),
                    values: r.iter().map(|(k, v)| f(k, v)).collect(),
                })
                .collect();
            Dataset::from_sparse(dataset.n_features(), rows)
        }
        _ => {
            let dense = dataset.to_dense();
            let d = dataset.n_features();
            let values = dense
                .dense_values()
                .unwrap_or(&[])
                .iter()
                .enumerate()
                .map(|(i, &v)| f(i % d, v))
                .collect();
            Dataset::from_dense(dataset.n_objects(), d, values).expect("same shape")
        }
    };
    let mut out = scaled;
    if let Some(l) = dataset.labels() {
        out = out.with_labels(l.to_vec());
    }
    if let Some(k) = dataset.known_outliers() {
        out = out.with_known_outliers(k.to_vec());
    }
    out
}
