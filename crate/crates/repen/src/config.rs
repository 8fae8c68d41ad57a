//! Flat `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment. Unknown keys are errors.
//! Keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `input` | dataset path | none |
//! | `output_dir` | output directory | none |
//! | `format` | `libsvm` or `csv` | by extension |
//! | `label_column` | CSV label column name | none |
//! | `outlier_label` | LIBSVM label value marking outliers | `1` |
//! | `n_features_hint` | LIBSVM feature count | observed |
//! | `min_max_scale` | scale features to `[0, 1]` | `false` |
//! | `labeled_outliers` | file of 0-based indices of known outliers | none |
//! | `subsample_size`, `ensemble_size`, `alpha`, `rep_dim`, `query_size`, `margin`, `n_epochs`, `batch_size`, `samples_per_epoch`, `optimizer_decay`, `optimizer_eps`, `labeled_ratio`, `seed` | hyperparameters | reference defaults |
//! | `threads` | worker threads | `REPEN_THREADS` or 1 |
//! | `deterministic` | force one thread | `false` |
//! | `repeats` | experiment repeats | 10 |
//! | `labeled_values` | labelled-outlier counts | `1,5,10,20,40,80` |
//! | `rep_dims` | representation dimensions | `1,10,20,...,100` |
//! | `sizes`, `scale_dims` | scalability grids | `1000,2000,4000` / none |
//! | `base_dims`, `base_size` | fixed `D` / `N` of the scalability sweeps | 10000 |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use repen_core::HyperParams;

use crate::io::{Format, LabelRule, LoadOptions};
use crate::{Error, Result};

/// Representation dimensions of the dimension-sensitivity sweep.
pub const DIM_GRID: [usize; 11] = [1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100];
/// Labelled-outlier counts of the labelled-curve experiment.
pub const LABELED_GRID: [usize; 6] = [1, 5, 10, 20, 40, 80];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub label_column: Option<String>,
    pub outlier_label: f64,
    pub n_features_hint: Option<usize>,
    pub min_max_scale: bool,
    pub labeled_outliers: Option<PathBuf>,
    pub params: HyperParams,
    pub threads: usize,
    pub deterministic: bool,
    pub repeats: usize,
    pub labeled_values: Vec<usize>,
    pub rep_dims: Vec<usize>,
    pub sizes: Vec<usize>,
    pub scale_dims: Vec<usize>,
    pub base_dims: usize,
    pub base_size: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            output_dir: None,
            format: None,
            label_column: None,
            outlier_label: 1.0,
            n_features_hint: None,
            min_max_scale: false,
            labeled_outliers: None,
            params: HyperParams::default(),
            threads: crate::parallel::default_threads(),
            deterministic: false,
            repeats: 10,
            labeled_values: LABELED_GRID.to_vec(),
            rep_dims: DIM_GRID.to_vec(),
            sizes: vec![1000, 2000, 4000],
            scale_dims: Vec::new(),
            base_dims: 10_000,
            base_size: 10_000,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(key, format!("cannot parse `{value}`")))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::invalid(key, format!("expected true or false, got `{value}`"))),
    }
}

fn list(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n + 1,
                message: format!("expected key = value, got `{line}`"),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::parse(&text)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let p = &mut self.params;
        match key {
            "input" => self.input = Some(PathBuf::from(value)),
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            "format" => {
                self.format = Some(Format::parse(value).ok_or_else(|| Error::invalid(key, "expected libsvm or csv"))?)
            }
            "label_column" => self.label_column = Some(value.to_string()),
            "outlier_label" => self.outlier_label = num(key, value)?,
            "n_features_hint" => self.n_features_hint = Some(num(key, value)?),
            "min_max_scale" => self.min_max_scale = flag(key, value)?,
            "labeled_outliers" => self.labeled_outliers = Some(PathBuf::from(value)),
            "subsample_size" => p.subsample_size = num(key, value)?,
            "ensemble_size" => p.ensemble_size = num(key, value)?,
            "alpha" => p.alpha = num(key, value)?,
            "rep_dim" => p.rep_dim = num(key, value)?,
            "query_size" => p.query_size = num(key, value)?,
            "margin" => p.margin = num(key, value)?,
            "n_epochs" => p.n_epochs = num(key, value)?,
            "batch_size" => p.batch_size = num(key, value)?,
            "samples_per_epoch" => p.samples_per_epoch = num(key, value)?,
            "optimizer_decay" => p.optimizer_decay = num(key, value)?,
            "optimizer_eps" => p.optimizer_eps = num(key, value)?,
            "labeled_ratio" => p.labeled_ratio = num(key, value)?,
            "seed" => p.rng_seed = num(key, value)?,
            "threads" => {
                self.threads = num(key, value)?;
                if self.threads < 1 {
                    return Err(Error::invalid(key, "threads ≥ 1"));
                }
            }
            "deterministic" => self.deterministic = flag(key, value)?,
            "repeats" => self.repeats = num(key, value)?,
            "labeled_values" => self.labeled_values = list(key, value)?,
            "rep_dims" => self.rep_dims = list(key, value)?,
            "sizes" => self.sizes = list(key, value)?,
            "scale_dims" => self.scale_dims = list(key, value)?,
            "base_dims" => self.base_dims = num(key, value)?,
            "base_size" => self.base_size = num(key, value)?,
            _ => return Err(Error::invalid(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies a `key=value` override string.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::invalid(pair, "expected key=value"))?;
        self.set(k.trim(), v.trim())
    }

    /// Thread count after `deterministic` is applied.
    pub fn effective_threads(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.threads.max(1)
        }
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            format: self.format,
            label_column: self.label_column.clone(),
            n_features_hint: self.n_features_hint,
            label_rule: LabelRule {
                outlier_value: self.outlier_label,
            },
        }
    }

    /// Every resolved setting in config syntax. Parsing the result gives back
    /// an equal configuration.
    pub fn to_manifest(&self) -> String {
        let mut s = String::new();
        let p = &self.params;
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(i) = &self.input {
            kv("input", i.display().to_string());
        }
        if let Some(o) = &self.output_dir {
            kv("output_dir", o.display().to_string());
        }
        if let Some(f) = self.format {
            kv("format", if f == Format::Csv { "csv" } else { "libsvm" }.into());
        }
        if let Some(l) = &self.label_column {
            kv("label_column", l.clone());
        }
        kv("outlier_label", self.outlier_label.to_string());
        if let Some(h) = self.n_features_hint {
            kv("n_features_hint", h.to_string());
        }
        kv("min_max_scale", self.min_max_scale.to_string());
        if let Some(l) = &self.labeled_outliers {
            kv("labeled_outliers", l.display().to_string());
        }
        kv("subsample_size", p.subsample_size.to_string());
        kv("ensemble_size", p.ensemble_size.to_string());
        kv("alpha", p.alpha.to_string());
        kv("rep_dim", p.rep_dim.to_string());
        kv("query_size", p.query_size.to_string());
        kv("margin", p.margin.to_string());
        kv("n_epochs", p.n_epochs.to_string());
        kv("batch_size", p.batch_size.to_string());
        kv("samples_per_epoch", p.samples_per_epoch.to_string());
        kv("optimizer_decay", p.optimizer_decay.to_string());
        kv("optimizer_eps", p.optimizer_eps.to_string());
        kv("labeled_ratio", p.labeled_ratio.to_string());
        kv("seed", p.rng_seed.to_string());
        kv("threads", self.threads.to_string());
        kv("deterministic", self.deterministic.to_string());
        kv("repeats", self.repeats.to_string());
        kv("labeled_values", join(&self.labeled_values));
        kv("rep_dims", join(&self.rep_dims));
        kv("sizes", join(&self.sizes));
        kv("scale_dims", join(&self.scale_dims));
        kv("base_dims", self.base_dims.to_string());
        kv("base_size", self.base_size.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::parse("input = data.svm\noutput_dir = out # where\n").unwrap();
        assert_eq!(cfg.input.as_deref(), Some(Path::new("data.svm")));
        let p = &cfg.params;
        assert_eq!(
            (
                p.subsample_size,
                p.ensemble_size,
                p.alpha,
                p.rep_dim,
                p.query_size,
                p.margin
            ),
            (8, 50, 1.732, 20, 1, 1000.0)
        );
        assert_eq!((p.n_epochs, p.batch_size, p.samples_per_epoch), (30, 256, 5000));
    }

    #[test]
    fn manifest_round_trips() {
        let mut cfg =
            RunConfig::parse("input = a.csv\nlabel_column = y\nrep_dim = 7\nseed = 99\nsizes = 10,20").unwrap();
        cfg.set_pair("alpha=0.5").unwrap();
        let back = RunConfig::parse(&cfg.to_manifest()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::parse("rep_dim = x").unwrap_err().to_string();
        assert!(err.contains("rep_dim"), "{err}");
        let err = RunConfig::parse("bogus = 1").unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
        assert!(RunConfig::parse("no equals sign").is_err());
        let cfg = RunConfig::parse("rep_dim = 0").unwrap();
        let err = cfg.params.validate().unwrap_err().to_string();
        assert!(err.contains("rep_dim ≥ 1"), "{err}");
    }

    #[test]
    fn deterministic_forces_one_thread() {
        let cfg = RunConfig::parse("threads = 4\ndeterministic = true").unwrap();
        assert_eq!(cfg.effective_threads(), 1);
    }
}
