//! Dataset, model and score files.

mod csv_file;
mod libsvm;
mod model_file;
mod scores;

use std::path::Path;

pub use csv_file::{load_csv, read_csv, save_csv, write_csv};
pub use libsvm::{load_libsvm, read_libsvm, save_libsvm, write_libsvm, LabelRule};
pub use model_file::{load_model, read_model, save_model, write_model, MODEL_MAGIC, MODEL_VERSION};
pub use scores::{load_indices, save_indices, save_scores, write_scores};

use repen_core::Dataset;

use crate::Result;

/// Dataset file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Libsvm,
    Csv,
}

impl Format {
    /// `.csv` means CSV; anything else is read as LIBSVM.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Libsvm,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "libsvm" | "svmlight" => Some(Format::Libsvm),
            "csv" => Some(Format::Csv),
            _ => None,
        }
    }
}

/// Options for [`load_dataset`].
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub format: Option<Format>,
    pub label_column: Option<String>,
    pub n_features_hint: Option<usize>,
    pub label_rule: LabelRule,
}

pub fn load_dataset(path: &Path, opts: &LoadOptions) -> Result<Dataset> {
    match opts.format.unwrap_or_else(|| Format::from_path(path)) {
        Format::Libsvm => load_libsvm(path, opts.n_features_hint, &opts.label_rule),
        Format::Csv => load_csv(path, opts.label_column.as_deref()),
    }
}

pub fn save_dataset(path: &Path, dataset: &Dataset, format: Format) -> Result<()> {
    match format {
        Format::Libsvm => save_libsvm(path, dataset),
        Format::Csv => save_csv(path, dataset),
    }
}
