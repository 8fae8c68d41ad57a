//! Experiment protocols and result tables.
//!
//! Every experiment repeats with seeds `rng_seed + repeat`. Detection times
//! are the median of [`TIMING_RUNS`] scoring runs and cover Sp scoring only.
//! Training times cover initial scoring, training and transform of a single
//! run.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use repen_core::metrics::auc;
use repen_core::rng::{stream, Purpose};
use repen_core::{Backend, Dataset, HyperParams, Label};

use crate::pipeline::{self, sp_config};
use crate::synth::synth_gaussian_with_outliers;
use crate::{parallel, Error, Result};

/// Scoring runs per timed cell.
pub const TIMING_RUNS: usize = 3;

pub const ORIGINAL_SP: &str = "original_sp";
pub const REPEN_SP: &str = "repen_sp";

/// Header of every result table.
pub const RECORD_HEADER: &str = "method,M,n_labeled,repeat,auc,detect_seconds,train_seconds";

/// One row of a result table. For `original_sp`, `rep_dim` is the input
/// dimension and `train_seconds` is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub method: &'static str,
    pub rep_dim: usize,
    pub n_labeled: usize,
    pub repeat: usize,
    pub auc: f64,
    pub detect_seconds: f64,
    pub train_seconds: f64,
}

/// Runs `f` `runs` times; returns the last result and the median time.
pub fn timed_median<T>(runs: usize, mut f: impl FnMut() -> Result<T>) -> Result<(T, f64)> {
    let mut times = Vec::with_capacity(runs.max(1));
    let mut out = None;
    for _ in 0..runs.max(1) {
        let t = Instant::now();
        out = Some(f()?);
        times.push(t.elapsed().as_secs_f64());
    }
    Ok((out.expect("at least one run"), median(&mut times)))
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn labels_of(dataset: &Dataset) -> Result<&[Label]> {
    dataset
        .labels()
        .ok_or_else(|| Error::invalid("labels", "experiments need a labelled dataset"))
}

fn seeded(params: &HyperParams, repeat: usize) -> HyperParams {
    HyperParams {
        rng_seed: params.rng_seed.wrapping_add(repeat as u64),
        ..params.clone()
    }
}

fn original_record(dataset: &Dataset, params: &HyperParams, repeat: usize, threads: usize) -> Result<Record> {
    let labels = labels_of(dataset)?;
    let cfg = sp_config(params, Backend::KdTree);
    let (scores, secs) = timed_median(TIMING_RUNS, || parallel::sp_score(dataset, &cfg, threads))?;
    Ok(Record {
        method: ORIGINAL_SP,
        rep_dim: dataset.n_features(),
        n_labeled: 0,
        repeat,
        auc: auc(scores.as_slice(), labels)?,
        detect_seconds: secs,
        train_seconds: 0.0,
    })
}

/// Trains on `train_set` and scores `eval_set` in the learned space.
fn repen_record(
    train_set: &Dataset,
    eval_set: &Dataset,
    params: &HyperParams,
    repeat: usize,
    threads: usize,
) -> Result<Record> {
    let labels = labels_of(eval_set)?;
    let out = pipeline::run(train_set, params, train_set.known_outliers(), threads)?;
    let embedded = repen_core::learner::transform(&out.model, eval_set)?;
    let cfg = sp_config(params, Backend::KdTree);
    let (scores, secs) = timed_median(TIMING_RUNS, || parallel::sp_score(&embedded, &cfg, threads))?;
    Ok(Record {
        method: REPEN_SP,
        rep_dim: params.rep_dim,
        n_labeled: train_set.known_outliers().map_or(0, <[usize]>::len),
        repeat,
        auc: auc(scores.as_slice(), labels)?,
        detect_seconds: secs,
        train_seconds: out.timings.offline(),
    })
}

/// Sp in the original space against Sp in the learned space.
pub fn run_comparison(dataset: &Dataset, params: &HyperParams, repeats: usize, threads: usize) -> Result<Vec<Record>> {
    labels_of(dataset)?;
    let mut rows = Vec::with_capacity(2 * repeats);
    for r in 0..repeats {
        let p = seeded(params, r);
        rows.push(original_record(dataset, &p, r, threads)?);
        rows.push(repen_record(dataset, dataset, &p, r, threads)?);
    }
    Ok(rows)
}

/// Evaluation rows and a labelled-outlier pool of `pool_size` outliers drawn
/// at random. The pool is disjoint from the evaluation rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSplit {
    pub eval: Vec<usize>,
    pub pool: Vec<usize>,
}

pub fn labeled_split(dataset: &Dataset, pool_size: usize, seed: u64) -> Result<LabeledSplit> {
    let labels = labels_of(dataset)?;
    let mut outliers: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_outlier()).collect();
    if outliers.len() <= pool_size {
        return Err(Error::invalid(
            "labeled_values",
            format!(
                "{} outliers cannot supply a pool of {pool_size} and keep one for evaluation",
                outliers.len()
            ),
        ));
    }
    outliers.shuffle(&mut stream(seed, Purpose::Experiment, 0));
    let mut pool = outliers[..pool_size].to_vec();
    pool.sort_unstable();
    let eval = (0..labels.len()).filter(|i| pool.binary_search(i).is_err()).collect();
    Ok(LabeledSplit { eval, pool })
}

/// Training set made of the evaluation rows followed by `labeled` pool rows
/// flagged as known outliers.
pub fn labeled_training_set(dataset: &Dataset, split: &LabeledSplit, labeled: usize) -> Dataset {
    let mut rows = split.eval.clone();
    rows.extend_from_slice(&split.pool[..labeled]);
    let known = (split.eval.len()..rows.len()).collect();
    dataset.select(&rows).with_known_outliers(known)
}

/// Learned-space AUC for each labelled count in `l_values`. Each repeat draws
/// one pool of `max(l_values)` outliers; smaller counts use a prefix of it.
/// With `l = 0` the run equals the `repen_sp` row of [`run_comparison`] on
/// the evaluation rows.
pub fn run_labeled_curve(
    dataset: &Dataset,
    params: &HyperParams,
    l_values: &[usize],
    repeats: usize,
    threads: usize,
) -> Result<Vec<Record>> {
    let max_l = l_values.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::with_capacity(l_values.len() * repeats);
    for r in 0..repeats {
        let p = seeded(params, r);
        let split = labeled_split(dataset, max_l, p.rng_seed)?;
        let eval_set = dataset.select(&split.eval);
        for &l in l_values {
            let train_set = if l == 0 {
                eval_set.clone()
            } else {
                labeled_training_set(dataset, &split, l)
            };
            rows.push(repen_record(&train_set, &eval_set, &p, r, threads)?);
        }
    }
    Ok(rows)
}

/// Learned-space AUC for each representation dimension in `dims`.
pub fn run_dim_sensitivity(
    dataset: &Dataset,
    params: &HyperParams,
    dims: &[usize],
    repeats: usize,
    threads: usize,
) -> Result<Vec<Record>> {
    let mut rows = Vec::with_capacity(dims.len() * repeats);
    for r in 0..repeats {
        for &m in dims {
            let p = HyperParams {
                rep_dim: m,
                ..seeded(params, r)
            };
            rows.push(repen_record(dataset, dataset, &p, r, threads)?);
        }
    }
    Ok(rows)
}

/// Mean and population standard deviation of one group of records.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub method: &'static str,
    pub rep_dim: usize,
    pub n_labeled: usize,
    pub repeats: usize,
    pub mean_auc: f64,
    pub std_auc: f64,
    pub mean_detect_seconds: f64,
    pub mean_train_seconds: f64,
}

/// Groups records by method, dimension and labelled count, in order of first
/// appearance.
pub fn summarize(records: &[Record]) -> Vec<Summary> {
    let mut keys: Vec<(&'static str, usize, usize)> = Vec::new();
    for r in records {
        let k = (r.method, r.rep_dim, r.n_labeled);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(method, rep_dim, n_labeled)| {
            let g: Vec<&Record> = records
                .iter()
                .filter(|r| (r.method, r.rep_dim, r.n_labeled) == (method, rep_dim, n_labeled))
                .collect();
            let n = g.len() as f64;
            let aucs: Vec<f64> = g.iter().map(|r| r.auc).collect();
            let (mean_auc, std_auc) = repen_core::data::population_moments(&aucs);
            Summary {
                method,
                rep_dim,
                n_labeled,
                repeats: g.len(),
                mean_auc,
                std_auc,
                mean_detect_seconds: g.iter().map(|r| r.detect_seconds).sum::<f64>() / n,
                mean_train_seconds: g.iter().map(|r| r.train_seconds).sum::<f64>() / n,
            }
        })
        .collect()
}

/// Synthetic data for the scalability sweeps: 2% outliers, 10 relevant
/// features, separation 6.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalabilityPlan {
    pub base_dims: usize,
    pub base_size: usize,
    pub sizes: Vec<usize>,
    pub dims: Vec<usize>,
    pub outlier_rate: f64,
    pub d_relevant: usize,
    pub separation: f64,
    pub data_seed: u64,
}

impl Default for ScalabilityPlan {
    fn default() -> Self {
        Self {
            base_dims: 10_000,
            base_size: 10_000,
            sizes: vec![1000, 2000, 4000],
            dims: Vec::new(),
            outlier_rate: 0.02,
            d_relevant: 10,
            separation: 6.0,
            data_seed: 0,
        }
    }
}

pub const SCALE_HEADER: &str = "axis,n_objects,n_features,total_seconds,train_seconds,detect_seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleRow {
    /// `size` for the sweep over `N`, `dims` for the sweep over `D`.
    pub axis: &'static str,
    pub n_objects: usize,
    pub n_features: usize,
    pub total_seconds: f64,
    pub train_seconds: f64,
    pub detect_seconds: f64,
}

/// Median-of-three pipeline timings for one synthetic configuration.
pub fn time_configuration(
    n_objects: usize,
    n_features: usize,
    plan: &ScalabilityPlan,
    params: &HyperParams,
    threads: usize,
) -> Result<(f64, f64, f64)> {
    if n_features <= plan.d_relevant {
        return Err(Error::invalid(
            "scale_dims",
            format!("must exceed {} relevant features", plan.d_relevant),
        ));
    }
    let n_out = ((n_objects as f64 * plan.outlier_rate).round() as usize).max(1);
    if n_out >= n_objects {
        return Err(Error::invalid("sizes", "too small for the outlier rate"));
    }
    let ds = synth_gaussian_with_outliers(
        n_objects - n_out,
        n_out,
        plan.d_relevant,
        n_features - plan.d_relevant,
        plan.separation,
        plan.data_seed,
    )?;
    let (mut total, mut train, mut detect) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..TIMING_RUNS {
        let t = pipeline::run(&ds, params, None, threads)?.timings;
        total.push(t.total());
        train.push(t.offline());
        detect.push(t.detection);
    }
    Ok((median(&mut total), median(&mut train), median(&mut detect)))
}

/// Total runtime over `N ∈ sizes` at `D = base_dims`, then over
/// `D ∈ dims` at `N = base_size`.
pub fn run_scalability(plan: &ScalabilityPlan, params: &HyperParams, threads: usize) -> Result<Vec<ScaleRow>> {
    let grid = plan
        .sizes
        .iter()
        .map(|&n| ("size", n, plan.base_dims))
        .chain(plan.dims.iter().map(|&d| ("dims", plan.base_size, d)));
    let mut rows = Vec::new();
    for (axis, n, d) in grid {
        let (total_seconds, train_seconds, detect_seconds) = time_configuration(n, d, plan, params, threads)?;
        log::info!("{axis}: N={n} D={d} total {total_seconds:.2}s");
        rows.push(ScaleRow {
            axis,
            n_objects: n,
            n_features: d,
            total_seconds,
            train_seconds,
            detect_seconds,
        });
    }
    Ok(rows)
}

pub fn write_records<W: Write>(mut w: W, records: &[Record]) -> Result<()> {
    writeln!(w, "{RECORD_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.method, r.rep_dim, r.n_labeled, r.repeat, r.auc, r.detect_seconds, r.train_seconds
        )?;
    }
    Ok(())
}

pub fn write_scale_rows<W: Write>(mut w: W, rows: &[ScaleRow]) -> Result<()> {
    writeln!(w, "{SCALE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.axis, r.n_objects, r.n_features, r.total_seconds, r.train_seconds, r.detect_seconds
        )?;
    }
    Ok(())
}

fn save_with(path: &Path, f: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> Result<()>) -> Result<()> {
    let file = std::fs::File::create(path).map_err(Error::io(path))?;
    let mut w = std::io::BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(Error::io(path))
}

pub fn save_records(path: &Path, records: &[Record]) -> Result<()> {
    save_with(path, |w| write_records(w, records))
}

pub fn save_scale_rows(path: &Path, rows: &[ScaleRow]) -> Result<()> {
    save_with(path, |w| write_scale_rows(w, rows))
}

/// Plot data and gnuplot script for a summarized experiment. `x` picks the
/// plotted variable: `"M"` or `"n_labeled"`. Returns `(dat, script)`; the
/// script reads the data from `dat_name`.
pub fn curve_plot(summaries: &[Summary], x: &str, dat_name: &str, png_name: &str) -> (String, String) {
    let mut dat = format!("# {x} mean_auc std_auc\n");
    for s in summaries.iter().filter(|s| s.method == REPEN_SP) {
        let xv = if x == "M" { s.rep_dim } else { s.n_labeled };
        let _ = writeln!(dat, "{xv} {} {}", s.mean_auc, s.std_auc);
    }
    let script = format!(
        "set terminal pngcairo size 640,480\nset output '{png_name}'\nset xlabel '{x}'\nset ylabel 'AUC'\n\
         set yrange [0:1]\nset grid\nplot '{dat_name}' using 1:2:3 with yerrorlines title 'REPEN + Sp'\n"
    );
    (dat, script)
}

/// Bar chart of mean AUC per method.
pub fn comparison_plot(summaries: &[Summary], dat_name: &str, png_name: &str) -> (String, String) {
    let mut dat = String::from("# method mean_auc std_auc mean_detect_seconds\n");
    for s in summaries {
        let _ = writeln!(
            dat,
            "{} {} {} {}",
            s.method, s.mean_auc, s.std_auc, s.mean_detect_seconds
        );
    }
    let script = format!(
        "set terminal pngcairo size 640,480\nset output '{png_name}'\nset style data histogram\n\
         set style fill solid 0.6\nset ylabel 'AUC'\nset yrange [0:1]\n\
         plot '{dat_name}' using 2:xtic(1) title 'mean AUC'\n"
    );
    (dat, script)
}

/// Runtime against `N` and against `D`, one data block per axis.
pub fn scalability_plot(rows: &[ScaleRow], dat_name: &str, png_name: &str) -> (String, String) {
    let mut dat = String::from("# size axis: N total_seconds\n");
    for r in rows.iter().filter(|r| r.axis == "size") {
        let _ = writeln!(dat, "{} {}", r.n_objects, r.total_seconds);
    }
    dat.push_str("\n\n# dims axis: D total_seconds\n");
    for r in rows.iter().filter(|r| r.axis == "dims") {
        let _ = writeln!(dat, "{} {}", r.n_features, r.total_seconds);
    }
    let script = format!(
        "set terminal pngcairo size 960,480\nset output '{png_name}'\nset multiplot layout 1,2\n\
         set ylabel 'seconds'\nset xlabel 'N'\nplot '{dat_name}' index 0 using 1:2 with linespoints title 'vary N'\n\
         set xlabel 'D'\nplot '{dat_name}' index 1 using 1:2 with linespoints title 'vary D'\nunset multiplot\n"
    );
    (dat, script)
}
