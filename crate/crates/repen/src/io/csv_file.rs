//! Numeric CSV with an optional header row and an optional label column.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use repen_core::{Dataset, Label};

use crate::{Error, Result};

fn parse_label(cell: &str) -> Option<Label> {
    match cell.trim().to_ascii_lowercase().as_str() {
        "outlier" | "true" | "yes" => Some(Label::Outlier),
        "inlier" | "false" | "no" => Some(Label::Inlier),
        other => other
            .parse::<f64>()
            .ok()
            .map(|v| if v > 0.0 { Label::Outlier } else { Label::Inlier }),
    }
}

/// Reads a dense dataset. A first row with any non-numeric cell is taken as
/// the header. `label_column` names a header column holding labels (numbers
/// above zero, `outlier`, `true` or `yes` mark outliers). Without it, a
/// header column named `label` is used, as written by [`write_csv`].
pub fn read_csv<R: Read>(reader: R, label_column: Option<&str>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records().enumerate().peekable();
    let mut label_idx = None;
    let mut width = None;
    if let Some((_, Ok(first))) = records.peek() {
        let is_header = first.iter().any(|c| c.parse::<f64>().is_err());
        if is_header {
            let header = first.clone();
            if let Some(name) = label_column {
                label_idx = Some(header.iter().position(|c| c == name).ok_or_else(|| Error::Parse {
                    line: 1,
                    message: format!("label column `{name}` not in header"),
                })?);
            } else {
                label_idx = header.iter().position(|c| c == "label");
            }
            width = Some(header.len());
            records.next();
        }
    }
    if label_column.is_some() && label_idx.is_none() {
        return Err(Error::Parse {
            line: 1,
            message: "a label column needs a header row".into(),
        });
    }
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0;
    for (lineno, rec) in records {
        let rec = rec?;
        let line = lineno + 1;
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(Error::Parse {
                line,
                message: format!("ragged row: expected {w} cells, found {}", rec.len()),
            });
        }
        for (col, cell) in rec.iter().enumerate() {
            if Some(col) == label_idx {
                labels.push(parse_label(cell).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("invalid label `{cell}`"),
                })?);
            } else {
                values.push(cell.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("non-numeric cell `{cell}` in column {}", col + 1),
                })?);
            }
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::NoRecords);
    }
    let d = width.unwrap_or(0) - label_idx.is_some() as usize;
    let ds = Dataset::from_dense(n, d, values)?;
    Ok(if label_idx.is_some() {
        ds.with_labels(labels)
    } else {
        ds
    })
}

pub fn load_csv(path: &Path, label_column: Option<&str>) -> Result<Dataset> {
    let file = File::open(path).map_err(Error::io(path))?;
    read_csv(std::io::BufReader::new(file), label_column)
}

/// Header `f1..fD` plus `label` (1 = outlier, 0 = inlier) when labels exist.
pub fn write_csv<W: Write>(w: W, dataset: &Dataset) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let d = dataset.n_features();
    let labels = dataset.labels();
    let mut header: Vec<String> = (1..=d).map(|k| format!("f{k}")).collect();
    if labels.is_some() {
        header.push("label".into());
    }
    wtr.write_record(&header)?;
    let mut record = Vec::with_capacity(d + 1);
    for (i, row) in dataset.rows().enumerate() {
        record.clear();
        record.extend(row.to_dense(d).iter().map(|v| v.to_string()));
        if let Some(l) = labels {
            record.push(if l[i].is_outlier() { "1" } else { "0" }.to_string());
        }
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn save_csv(path: &Path, dataset: &Dataset) -> Result<()> {
    let file = File::create(path).map_err(Error::io(path))?;
    write_csv(std::io::BufWriter::new(file), dataset)
}
