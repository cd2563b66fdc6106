use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use simland::embedding::{embed_pairs, embed_singletons};
use simland::ftune::{fit_singletons, ftune_binary, ftune_m, ftune_s_multiclass, FtuneConfig};
use simland::goodness::{verify_margin_bound, verify_surrogate_bound, BoundOptions};
use simland::harness::{
    curve_data, emit_report, exit_code, report_exit_code, report_json, resolve_paths,
    run_experiment, write_curve_csv,
};
use simland::landmark::{
    dselect, dselect_landmarks, dselect_multiclass, random_landmarks, random_pairs,
};
use simland::{
    data, seed, synth, DataPaths, Dataset, Error, ExperimentConfig, GoodnessParams, Kernel,
    KernelSpec, LandmarkSet, LossFunction, Result, SelectionMode, SplitSpec, TransferFamily,
    TransferFunction,
};

#[derive(Parser)]
#[command(
    name = "simland",
    version,
    about = "Classifiers from landmarked similarity embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a repeated-split experiment described by a JSON config.
    Experiment(ExperimentArgs),
    /// Fit one method on a single split and report its accuracy.
    Ftune(FtuneArgs),
    /// Write the landmarked embedding of every point as CSV.
    Embed(EmbedArgs),
    /// Print diversity-selected landmarks (and pairs for binary data).
    Dselect(DselectArgs),
    /// Monte-Carlo check of a landmark-count bound on planted instances.
    VerifyTheory(VerifyArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// JSON report path; a per-run CSV is written next to it. Defaults to
    /// stdout (JSON only).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accuracy-versus-landmarks CSV.
    #[arg(long)]
    curve_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Precomputed,
    Gaussian,
}

#[derive(Args)]
struct DataArgs {
    /// Headerless CSV of feature vectors.
    #[arg(long)]
    features: Option<PathBuf>,
    /// Headerless CSV similarity (or distance) matrix.
    #[arg(long)]
    similarity: Option<PathBuf>,
    /// One integer label per line.
    #[arg(long)]
    labels: PathBuf,
    /// Defaults to precomputed when a matrix is given, Gaussian otherwise.
    #[arg(long, value_enum)]
    kernel: Option<KernelArg>,
    /// Gaussian width; defaults to the mean pairwise training distance.
    #[arg(long)]
    width: Option<f64>,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        data::load_dataset(&DataPaths {
            features: self.features.clone(),
            similarity: self.similarity.clone(),
            labels: self.labels.clone(),
        })
    }

    fn kernel_spec(&self) -> KernelSpec {
        let kind = self.kernel.unwrap_or(if self.similarity.is_some() {
            KernelArg::Precomputed
        } else {
            KernelArg::Gaussian
        });
        match kind {
            KernelArg::Precomputed => KernelSpec::precomputed(),
            KernelArg::Gaussian => KernelSpec::gaussian(self.width),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Select {
    Random,
    Dselect,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Similarity,
    Distance,
}

impl From<ModeArg> for SelectionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Similarity => SelectionMode::Similarity,
            ModeArg::Distance => SelectionMode::Distance,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    #[value(name = "ftune-s")]
    FtuneS,
    #[value(name = "ftune-m")]
    FtuneM,
    Bbs,
    #[value(name = "sign-baseline")]
    SignBaseline,
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Hinge,
    Logistic,
}

fn parse_transfer(s: &str) -> std::result::Result<TransferFunction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> std::result::Result<TransferFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct SelectArgs {
    /// Number of landmarks (pairs for pair methods).
    #[arg(long)]
    landmarks: usize,
    #[arg(long, value_enum, default_value = "random")]
    select: Select,
    #[arg(long, value_enum, default_value = "similarity")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FtuneArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    select: SelectArgs,
    #[arg(long, value_enum, default_value = "ftune-s")]
    method: MethodArg,
    /// Fix the transfer: `ramp:<slope>`, `sign` or `identity`.
    #[arg(long, value_parser = parse_transfer, conflicts_with = "family")]
    transfer: Option<TransferFunction>,
    /// `default` or `ramp:<s1,s2,...>`.
    #[arg(long, value_parser = parse_family)]
    family: Option<TransferFamily>,
    #[arg(long, value_enum, default_value = "hinge")]
    loss: LossArg,
    #[arg(long, value_delimiter = ',', default_values_t = simland::trainer::DEFAULT_C_GRID)]
    c_grid: Vec<f64>,
    /// Train without the bias feature.
    #[arg(long)]
    no_bias: bool,
    #[arg(long, default_value_t = 0.5)]
    train_frac: f64,
    #[arg(long, default_value_t = 0.25)]
    valid_frac: f64,
    #[arg(long, default_value_t = 0.25)]
    test_frac: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    select: SelectArgs,
    /// Embed with singleton landmarks (raw similarities) instead of pairs.
    #[arg(long)]
    singletons: bool,
    #[arg(long, value_parser = parse_transfer, default_value = "identity")]
    transfer: TransferFunction,
    /// Embedding CSV, one row per point.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DselectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    landmarks: usize,
    #[arg(long, value_enum, default_value = "similarity")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    Margin,
    Surrogate,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    bound: BoundArg,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.2)]
    gamma: f64,
    #[arg(long = "b", default_value_t = 1.0)]
    b_bound: f64,
    #[arg(long, default_value_t = 0.05)]
    epsilon_one: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Surrogate loss for the surrogate bound.
    #[arg(long, value_enum, default_value = "hinge")]
    loss: LossArg,
    /// Hinge margin for the surrogate bound.
    #[arg(long, default_value_t = 1.0)]
    hinge_margin: f64,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Planted noise amplitude; defaults to half the admissible maximum.
    #[arg(long)]
    noise: Option<f64>,
    /// Override the prescribed number of pairs.
    #[arg(long)]
    landmarks: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Multimodal,
    #[value(name = "sign-favoring")]
    SignFavoring,
    #[value(name = "linear-margin")]
    LinearMargin,
    Mixed,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    #[arg(long, default_value_t = 800)]
    n: usize,
    /// Modes per class (multimodal only).
    #[arg(long, default_value_t = 4)]
    modes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving `features.csv` or `similarity.csv` and
    /// `labels.csv`.
    #[arg(long)]
    out_dir: PathBuf,
}

fn loss_of(arg: LossArg, hinge_margin: f64) -> LossFunction {
    match arg {
        LossArg::Hinge => LossFunction::hinge(hinge_margin),
        LossArg::Logistic => LossFunction::logistic(),
    }
}

fn write_json(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    match out {
        Some(path) => std::fs::write(path, s)?,
        None => print!("{s}"),
    }
    Ok(())
}

fn experiment(args: &ExperimentArgs) -> Result<i32> {
    let mut cfg = ExperimentConfig::from_json_file(&args.config)?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    cfg.data = resolve_paths(&cfg.data, base);
    let report = run_experiment(&cfg)?;
    match &args.out {
        Some(path) => emit_report(&report, path)?,
        None => print!("{}", report_json(&report)?),
    }
    if let Some(path) = &args.curve_out {
        write_curve_csv(&curve_data(&report)?, path)?;
    }
    if report.degraded {
        log::warn!("some cells have no successful run");
    }
    Ok(report_exit_code(&report))
}

/// Landmark points for singleton methods.
fn pick_landmarks(
    kernel: &Kernel<'_>,
    train: &[usize],
    sel: &SelectArgs,
    lseed: u64,
) -> Result<LandmarkSet> {
    let ds = kernel.dataset();
    match sel.select {
        Select::Random => random_landmarks(train, sel.landmarks, lseed),
        Select::Dselect if ds.is_binary() => {
            dselect_landmarks(kernel, train, sel.landmarks, lseed, sel.mode.into())
        }
        Select::Dselect => {
            dselect_multiclass(kernel, ds, train, sel.landmarks, lseed, sel.mode.into())
        }
    }
}

fn ftune(args: &FtuneArgs) -> Result<i32> {
    let ds = args.data.load()?;
    let sel = &args.select;
    let split_spec = SplitSpec::new(
        args.train_frac,
        args.valid_frac,
        args.test_frac,
        seed::derive_named(sel.seed, "split"),
    );
    let splits = data::split(&ds, &split_spec)?;
    let kernel = Kernel::fit(&args.data.kernel_spec(), &ds, &splits.train)?;
    let (train, valid, test) = (&splits.train, &splits.valid, &splits.test);
    let lseed = seed::derive_named(sel.seed, "landmarks");
    let tseed = seed::derive_named(sel.seed, "train");
    let mode: SelectionMode = sel.mode.into();

    let mut cfg = FtuneConfig {
        loss: loss_of(args.loss, 1.0),
        c_grid: args.c_grid.clone(),
        ..FtuneConfig::default()
    };
    cfg.train.use_bias = !args.no_bias;
    if let Some(family) = &args.family {
        cfg.family = family.clone();
    }
    if let Some(f) = args.transfer {
        cfg = cfg.fixed(f);
    }
    if args.method == MethodArg::SignBaseline {
        cfg = cfg.fixed(TransferFunction::Sign);
    }

    let (result, test_accuracy) = match args.method {
        MethodArg::Bbs => {
            let landmarks = pick_landmarks(&kernel, train, sel, lseed)?;
            let fit = fit_singletons(&kernel, train, valid, &landmarks, &cfg, tseed)?;
            let acc = fit.accuracy(&kernel, test)?;
            (serde_json::to_value(&fit)?, acc)
        }
        MethodArg::FtuneS | MethodArg::SignBaseline => {
            let fit = if ds.is_binary() {
                let labels = ds.binary_labels()?;
                let pairs = match sel.select {
                    Select::Random => random_pairs(&labels, train, sel.landmarks, lseed)?,
                    Select::Dselect => {
                        dselect(&kernel, train, &labels, sel.landmarks, lseed, mode)?.1
                    }
                };
                ftune_binary(&kernel, train, valid, &pairs, &cfg, tseed)?
            } else {
                let pool = match sel.select {
                    Select::Random => train.clone(),
                    Select::Dselect => {
                        dselect_multiclass(&kernel, &ds, train, sel.landmarks, lseed, mode)?
                            .ids()
                            .to_vec()
                    }
                };
                ftune_s_multiclass(&kernel, train, valid, &pool, sel.landmarks, &cfg, lseed)?
            };
            let acc = fit.accuracy(&kernel, test)?;
            (serde_json::to_value(&fit)?, acc)
        }
        MethodArg::FtuneM => {
            let pool = match sel.select {
                Select::Random => train.clone(),
                Select::Dselect => {
                    dselect_multiclass(&kernel, &ds, train, sel.landmarks, lseed, mode)?
                        .ids()
                        .to_vec()
                }
            };
            let fit = ftune_m(&kernel, train, valid, &pool, sel.landmarks, &cfg, lseed)?;
            let acc = fit.accuracy(&kernel, test)?;
            (serde_json::to_value(&fit)?, acc)
        }
    };
    let method = args.method.to_possible_value().expect("named variant");
    let select = sel.select.to_possible_value().expect("named variant");
    write_json(
        &json!({
            "method": method.get_name(),
            "select": select.get_name(),
            "landmarks": sel.landmarks,
            "seed": sel.seed,
            "split": {"train": train.len(), "valid": valid.len(), "test": test.len()},
            "test_accuracy": test_accuracy,
            "result": result,
        }),
        args.out.as_deref(),
    )?;
    Ok(0)
}

fn embed(args: &EmbedArgs) -> Result<i32> {
    let ds = args.data.load()?;
    let all: Vec<usize> = (0..ds.len()).collect();
    let kernel = Kernel::fit(&args.data.kernel_spec(), &ds, &all)?;
    let sel = &args.select;
    let mode: SelectionMode = sel.mode.into();
    let (embedded, landmarks) = if args.singletons {
        let labels = if ds.is_binary() {
            ds.binary_labels()?
        } else {
            ds.one_vs_all(0)
        };
        let landmarks = pick_landmarks(&kernel, &all, sel, sel.seed)?;
        let e = embed_singletons(&kernel, &landmarks, &all, &labels)?;
        (e, serde_json::to_value(&landmarks)?)
    } else {
        let labels = ds.binary_labels()?;
        let pairs = match sel.select {
            Select::Random => random_pairs(&labels, &all, sel.landmarks, sel.seed)?,
            Select::Dselect => dselect(&kernel, &all, &labels, sel.landmarks, sel.seed, mode)?.1,
        };
        let e = embed_pairs(&kernel, &pairs, args.transfer, &all, &labels)?;
        (e, serde_json::to_value(&pairs)?)
    };
    embedded.write_csv(&args.out)?;
    write_json(
        &json!({
            "points": embedded.len(),
            "dim": embedded.dim(),
            "transfer": if args.singletons { None } else { Some(args.transfer) },
            "landmarks": landmarks,
        }),
        None,
    )?;
    Ok(0)
}

fn dselect_cmd(args: &DselectArgs) -> Result<i32> {
    let ds = args.data.load()?;
    let all: Vec<usize> = (0..ds.len()).collect();
    let kernel = Kernel::fit(&args.data.kernel_spec(), &ds, &all)?;
    let mode: SelectionMode = args.mode.into();
    let value = if ds.is_binary() {
        match dselect(
            &kernel,
            &all,
            &ds.binary_labels()?,
            args.landmarks,
            args.seed,
            mode,
        ) {
            Ok((landmarks, pairs)) => json!({"landmarks": landmarks, "pairs": pairs}),
            Err(Error::DiversityDegenerate(msg)) => {
                log::warn!("no pairs: {msg}");
                let landmarks = dselect_landmarks(&kernel, &all, args.landmarks, args.seed, mode)?;
                json!({"landmarks": landmarks, "pairs": null})
            }
            Err(e) => return Err(e),
        }
    } else {
        let landmarks = dselect_multiclass(&kernel, &ds, &all, args.landmarks, args.seed, mode)?;
        json!({"landmarks": landmarks})
    };
    write_json(&value, args.out.as_deref())?;
    Ok(0)
}

fn verify(args: &VerifyArgs) -> Result<i32> {
    let params = GoodnessParams::new(
        args.epsilon,
        args.gamma,
        args.b_bound,
        args.epsilon_one,
        args.delta,
    )?;
    let opts = BoundOptions {
        n: args.n,
        noise: args.noise,
        landmarks: args.landmarks,
    };
    let report = match args.bound {
        BoundArg::Margin => verify_margin_bound(&params, args.trials, args.seed, &opts)?,
        BoundArg::Surrogate => {
            let loss = loss_of(args.loss, args.hinge_margin);
            verify_surrogate_bound(&params, &loss, args.trials, args.seed, &opts)?
        }
    };
    write_json(&serde_json::to_value(&report)?, args.out.as_deref())?;
    Ok(if report.pass { 0 } else { 1 })
}

fn synth_cmd(args: &SynthArgs) -> Result<i32> {
    let ds = match args.kind {
        SynthKind::Multimodal => synth::multimodal_clusters(args.n, args.modes, args.seed)?,
        SynthKind::SignFavoring => synth::sign_favoring(args.n, args.seed)?,
        SynthKind::LinearMargin => synth::linear_margin(args.n, args.seed)?,
        SynthKind::Mixed => synth::mixed_multiclass(args.n, args.seed)?,
    };
    std::fs::create_dir_all(&args.out_dir)?;
    if let Some(m) = ds.similarity() {
        data::write_csv_rows(&args.out_dir.join("similarity.csv"), m.iter_rows())?;
    } else {
        let rows = (0..ds.len()).map(|i| ds.features(i).expect("feature dataset"));
        data::write_csv_rows(&args.out_dir.join("features.csv"), rows)?;
    }
    let labels: Vec<i64> = (0..ds.len())
        .map(|i| ds.original_labels()[ds.class_of(i)])
        .collect();
    data::write_labels(&args.out_dir.join("labels.csv"), &labels)?;
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Experiment(a) => experiment(a),
        Command::Ftune(a) => ftune(a),
        Command::Embed(a) => embed(a),
        Command::Dselect(a) => dselect_cmd(a),
        Command::VerifyTheory(a) => verify(a),
        Command::Synth(a) => synth_cmd(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
