use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use repen::config::RunConfig;
use repen::eval::{self, ScalabilityPlan};
use repen::io::{self, Format};
use repen::{pipeline, scale, synth};
use repen_core::metrics::auc;
use repen_core::Dataset;

#[derive(Parser)]
#[command(
    name = "repen",
    version,
    about = "Outlier detection with learned low-dimensional representations"
)]
struct Cli {
    /// Worker threads for Sp scoring [default: config, then $REPEN_THREADS, then 1].
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Single-threaded, bit-reproducible mode.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` config file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override one config key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Libsvm,
    Csv,
}

impl From<FileFormat> for Format {
    fn from(f: FileFormat) -> Self {
        match f {
            FileFormat::Libsvm => Format::Libsvm,
            FileFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Comparison,
    #[value(alias = "labeled_curve")]
    LabeledCurve,
    #[value(alias = "dim_sensitivity")]
    DimSensitivity,
    Scalability,
}

#[derive(Subcommand)]
enum Command {
    /// Score, threshold, train, transform and detect.
    Pipeline(ConfigArgs),
    /// Write a synthetic Gaussian dataset with planted outliers.
    Synth {
        #[arg(long)]
        n_inliers: usize,
        #[arg(long)]
        n_outliers: usize,
        #[arg(long)]
        d_relevant: usize,
        #[arg(long)]
        d_noise: usize,
        #[arg(long)]
        separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        format: Option<FileFormat>,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Run an experiment protocol and write its result table.
    Experiment {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Keep all inliers and a random subset of outliers.
    Downsample {
        #[command(flatten)]
        config: ConfigArgs,
        /// Outlier fraction of the written dataset.
        #[arg(long, default_value_t = 0.02)]
        rate: f64,
        #[arg(long, short)]
        output: PathBuf,
        /// Write the rows left out (original indices of held-out outliers) here.
        #[arg(long)]
        held_out: Option<PathBuf>,
    },
    /// Apply a saved model and score a dataset.
    Score {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        model: PathBuf,
        /// Score file to write.
        #[arg(long, short)]
        output: PathBuf,
    },
}

fn resolve(cli: &Cli, args: &ConfigArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for o in &args.overrides {
        cfg.set_pair(o)?;
    }
    if let Some(i) = &args.input {
        cfg.input = Some(i.clone());
    }
    if let Some(o) = &args.output_dir {
        cfg.output_dir = Some(o.clone());
    }
    if let Some(t) = cli.threads {
        cfg.set("threads", &t.to_string())?;
    }
    if cli.deterministic {
        cfg.deterministic = true;
    }
    cfg.params.validate()?;
    Ok(cfg)
}

fn load_input(cfg: &RunConfig) -> anyhow::Result<Dataset> {
    let Some(path) = &cfg.input else {
        bail!("no input dataset given (set `input` or pass --input)");
    };
    if !path.exists() {
        bail!("input file {} does not exist", path.display());
    }
    let mut ds = io::load_dataset(path, &cfg.load_options())?;
    if cfg.min_max_scale {
        ds = scale::min_max(&ds);
    }
    if let Some(p) = &cfg.labeled_outliers {
        let known = io::load_indices(p)?;
        ds = ds.with_known_outliers(known);
    }
    ds.ensure_valid()?;
    Ok(ds)
}

fn output_dir(cfg: &RunConfig) -> anyhow::Result<&Path> {
    let dir = cfg
        .output_dir
        .as_deref()
        .context("no output directory given (set `output_dir` or pass --output-dir)")?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_pipeline(cfg: &RunConfig) -> anyhow::Result<()> {
    let ds = load_input(cfg)?;
    let dir = output_dir(cfg)?;
    write_text(&dir.join("manifest.txt"), &cfg.to_manifest())?;
    let out = pipeline::run(&ds, &cfg.params, ds.known_outliers(), cfg.effective_threads())?;

    io::save_model(&dir.join("model.bin"), &out.model)?;
    io::save_csv(&dir.join("embedded.csv"), &out.embedded)?;
    io::save_scores(&dir.join("scores.csv"), out.scores.as_slice(), ds.labels())?;

    let mut report = String::new();
    let r = &out.report;
    writeln!(report, "objects = {}", ds.n_objects())?;
    writeln!(report, "features = {}", ds.n_features())?;
    writeln!(report, "outlier_candidates = {}", out.sets.outliers().len())?;
    writeln!(report, "top_k_fallback = {}", out.fallback)?;
    writeln!(report, "batches = {}", r.batches)?;
    writeln!(report, "initial_loss = {}", r.initial_loss)?;
    writeln!(report, "final_loss = {}", r.final_loss)?;
    writeln!(report, "initial_violation_rate = {}", r.initial_violation_rate)?;
    writeln!(report, "violation_rate = {}", r.violation_rate)?;
    for (e, l) in r.epoch_losses.iter().enumerate() {
        writeln!(report, "epoch_{} = {l}", e + 1)?;
    }
    let t = &out.timings;
    writeln!(report, "seconds_initial_scoring = {}", t.initial_scoring)?;
    writeln!(report, "seconds_training = {}", t.training)?;
    writeln!(report, "seconds_transform = {}", t.transform)?;
    writeln!(report, "seconds_detection = {}", t.detection)?;
    write_text(&dir.join("report.txt"), &report)?;

    if let Some(labels) = ds.labels() {
        let before = auc(out.initial_scores.as_slice(), labels)?;
        let after = auc(out.scores.as_slice(), labels)?;
        write_text(
            &dir.join("auc.txt"),
            &format!("original_sp = {before}\nrepen_sp = {after}\n"),
        )?;
        println!("AUC: original space {before:.4}, learned space {after:.4}");
    }
    println!("wrote results to {}", dir.display());
    Ok(())
}

fn cmd_experiment(kind: Kind, cfg: &RunConfig) -> anyhow::Result<()> {
    let dir = output_dir(cfg)?;
    write_text(&dir.join("manifest.txt"), &cfg.to_manifest())?;
    let threads = cfg.effective_threads();
    let p = &cfg.params;
    let (name, dat, script) = match kind {
        Kind::Scalability => {
            let plan = ScalabilityPlan {
                base_dims: cfg.base_dims,
                base_size: cfg.base_size,
                sizes: cfg.sizes.clone(),
                dims: cfg.scale_dims.clone(),
                data_seed: p.rng_seed,
                ..Default::default()
            };
            let rows = eval::run_scalability(&plan, p, threads)?;
            eval::save_scale_rows(&dir.join("scalability.csv"), &rows)?;
            for r in &rows {
                println!(
                    "{} N={} D={}: {:.3}s",
                    r.axis, r.n_objects, r.n_features, r.total_seconds
                );
            }
            let (dat, script) = eval::scalability_plot(&rows, "scalability.dat", "scalability.png");
            ("scalability", dat, script)
        }
        _ => {
            let ds = load_input(cfg)?;
            let (name, records) = match kind {
                Kind::Comparison => ("comparison", eval::run_comparison(&ds, p, cfg.repeats, threads)?),
                Kind::LabeledCurve => {
                    let mut ls = cfg.labeled_values.clone();
                    if !ls.contains(&0) {
                        ls.insert(0, 0);
                    }
                    (
                        "labeled_curve",
                        eval::run_labeled_curve(&ds, p, &ls, cfg.repeats, threads)?,
                    )
                }
                _ => (
                    "dim_sensitivity",
                    eval::run_dim_sensitivity(&ds, p, &cfg.rep_dims, cfg.repeats, threads)?,
                ),
            };
            eval::save_records(&dir.join(format!("{name}.csv")), &records)?;
            let summaries = eval::summarize(&records);
            for s in &summaries {
                println!(
                    "{} M={} l={}: AUC {:.4} ± {:.4}, detect {:.4}s",
                    s.method, s.rep_dim, s.n_labeled, s.mean_auc, s.std_auc, s.mean_detect_seconds
                );
            }
            let dat_name = format!("{name}.dat");
            let png_name = format!("{name}.png");
            let (dat, script) = match kind {
                Kind::Comparison => eval::comparison_plot(&summaries, &dat_name, &png_name),
                Kind::LabeledCurve => eval::curve_plot(&summaries, "n_labeled", &dat_name, &png_name),
                _ => eval::curve_plot(&summaries, "M", &dat_name, &png_name),
            };
            (name, dat, script)
        }
    };
    write_text(&dir.join(format!("{name}.dat")), &dat)?;
    write_text(&dir.join(format!("{name}.gp")), &script)?;
    println!("wrote results to {}", dir.display());
    Ok(())
}

fn cmd_score(cfg: &RunConfig, model: &Path, output: &Path) -> anyhow::Result<()> {
    let ds = load_input(cfg)?;
    let model = io::load_model(model)?;
    let (_, scores) = pipeline::detect(&model, &ds, &cfg.params, cfg.effective_threads())?;
    io::save_scores(output, scores.as_slice(), ds.labels())?;
    if let Some(labels) = ds.labels() {
        println!("AUC {:.4}", auc(scores.as_slice(), labels)?);
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Pipeline(args) => cmd_pipeline(&resolve(&cli, args)?),
        Command::Experiment { kind, config } => cmd_experiment(*kind, &resolve(&cli, config)?),
        Command::Synth {
            n_inliers,
            n_outliers,
            d_relevant,
            d_noise,
            separation,
            seed,
            format,
            output,
        } => {
            let ds = synth::synth_gaussian_with_outliers(
                *n_inliers,
                *n_outliers,
                *d_relevant,
                *d_noise,
                *separation,
                *seed,
            )?;
            let format = format.map_or_else(|| Format::from_path(output), Format::from);
            io::save_dataset(output, &ds, format)?;
            Ok(())
        }
        Command::Downsample {
            config,
            rate,
            output,
            held_out,
        } => {
            let cfg = resolve(&cli, config)?;
            let ds = load_input(&cfg)?;
            let split = synth::downsample(&ds, *rate, cfg.params.rng_seed)?;
            let format = cfg.format.unwrap_or_else(|| Format::from_path(output));
            io::save_dataset(output, &ds.select(&split.kept), format)?;
            if let Some(p) = held_out {
                io::save_indices(p, &split.held_out)?;
            }
            println!("kept {} of {} rows", split.kept.len(), ds.n_objects());
            Ok(())
        }
        Command::Score { config, model, output } => cmd_score(&resolve(&cli, config)?, model, output),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
