//! LIBSVM / SVMlight text: `<label> <index>:<value> ...` with 1-based
//! indices. Indices are 0-based in memory.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use repen_core::{Dataset, Label, Row, SparseRow};

use crate::{Error, Result};

/// Maps a numeric label to [`Label`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabelRule {
    /// Label value that marks an outlier. Everything else is an inlier.
    pub outlier_value: f64,
}

impl Default for LabelRule {
    fn default() -> Self {
        Self { outlier_value: 1.0 }
    }
}

impl LabelRule {
    pub fn apply(&self, value: f64) -> Label {
        if value == self.outlier_value {
            Label::Outlier
        } else {
            Label::Inlier
        }
    }
}

/// `D` is the hint when given. Without one it is the largest index on disk
/// plus one, matching the usual reading of 1-based files by 0-based tools.
pub fn read_libsvm<R: BufRead>(reader: R, n_features_hint: Option<usize>, rule: &LabelRule) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut max_index: Option<usize> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = lineno + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(format!("invalid label `{label_tok}`")))?;
        let mut pairs = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected index:value, got `{tok}`")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("invalid index `{idx}`")))?;
            if idx == 0 {
                return Err(err("indices are 1-based".into()));
            }
            let val: f64 = val.parse().map_err(|_| err(format!("invalid value `{val}`")))?;
            let index = idx - 1;
            if let Some(hint) = n_features_hint {
                if index >= hint {
                    return Err(err(format!("index {idx} exceeds the declared {hint} features")));
                }
            }
            if index > u32::MAX as usize {
                return Err(err(format!("index {idx} too large")));
            }
            max_index = Some(max_index.map_or(index, |m| m.max(index)));
            pairs.push((index as u32, val));
        }
        let row = SparseRow::from_pairs(pairs);
        if row.indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(err("duplicate feature index".into()));
        }
        rows.push(row);
        labels.push(rule.apply(label));
    }
    if rows.is_empty() {
        return Err(Error::NoRecords);
    }
    // without a hint, D is the largest on-disk (1-based) index plus one
    let d = n_features_hint.unwrap_or_else(|| max_index.map_or(0, |m| m + 2)).max(1);
    Ok(Dataset::from_sparse(d, rows).with_labels(labels))
}

pub fn load_libsvm(path: &Path, n_features_hint: Option<usize>, rule: &LabelRule) -> Result<Dataset> {
    let file = File::open(path).map_err(Error::io(path))?;
    read_libsvm(BufReader::new(file), n_features_hint, rule)
}

/// Writes labels as `1` (outlier) or `0` (inlier); unlabelled rows get `0`.
/// Dense rows are written without their zero entries.
pub fn write_libsvm<W: Write>(mut w: W, dataset: &Dataset) -> Result<()> {
    let labels = dataset.labels();
    for (i, row) in dataset.rows().enumerate() {
        let label = labels.map_or(0, |l| l[i].is_outlier() as u8);
        write!(w, "{label}")?;
        match row {
            Row::Sparse(r) => {
                for (idx, v) in r.iter() {
                    write!(w, " {}:{}", idx + 1, v)?;
                }
            }
            Row::Dense(x) => {
                for (idx, v) in x.iter().enumerate().filter(|(_, v)| **v != 0.0) {
                    write!(w, " {}:{}", idx + 1, v)?;
                }
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn save_libsvm(path: &Path, dataset: &Dataset) -> Result<()> {
    let file = File::create(path).map_err(Error::io(path))?;
    let mut w = BufWriter::new(file);
    write_libsvm(&mut w, dataset)?;
    w.flush().map_err(Error::io(path))
}
