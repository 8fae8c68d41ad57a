use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use repen_core::Label;

use crate::{Error, Result};

/// `index,score[,label]` per object.
pub fn write_scores<W: Write>(mut w: W, scores: &[f64], labels: Option<&[Label]>) -> Result<()> {
    match labels {
        Some(_) => writeln!(w, "index,score,label")?,
        None => writeln!(w, "index,score")?,
    }
    for (i, s) in scores.iter().enumerate() {
        match labels {
            Some(l) => writeln!(w, "{i},{s},{}", l[i].is_outlier() as u8)?,
            None => writeln!(w, "{i},{s}")?,
        }
    }
    Ok(())
}

pub fn save_scores(path: &Path, scores: &[f64], labels: Option<&[Label]>) -> Result<()> {
    let file = File::create(path).map_err(Error::io(path))?;
    let mut w = BufWriter::new(file);
    write_scores(&mut w, scores, labels)?;
    w.flush().map_err(Error::io(path))
}

/// One 0-based index per line; blank lines and `#` comments are skipped.
pub fn load_indices(path: &Path) -> Result<Vec<usize>> {
    let file = File::open(path).map_err(Error::io(path))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.split('#').next().unwrap_or("").trim();
        if t.is_empty() {
            continue;
        }
        out.push(t.parse().map_err(|_| Error::Parse {
            line: n + 1,
            message: format!("invalid index `{t}`"),
        })?);
    }
    Ok(out)
}

pub fn save_indices(path: &Path, indices: &[usize]) -> Result<()> {
    let file = File::create(path).map_err(Error::io(path))?;
    let mut w = BufWriter::new(file);
    for i in indices {
        writeln!(w, "{i}")?;
    }
    w.flush().map_err(Error::io(path))
}
