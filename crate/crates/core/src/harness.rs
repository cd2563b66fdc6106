//! Repeated-split experiments comparing landmarking methods.
//!
//! Each run derives its own seed from the master seed and the run index,
//! draws a fresh train/validation/test split, fits the kernel on the
//! training split and evaluates every `(method, landmark count)` cell on the
//! test split. Landmark draws depend only on the run and the landmark count,
//! so methods that share a selection rule see the same landmarks.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::data::{load_dataset, split, DataPaths, Dataset, Kernel, KernelSpec, SplitSpec, Splits};
use crate::error::{Error, Result};
use crate::ftune::{fit_singletons, ftune_binary, ftune_m, ftune_s_multiclass, FtuneConfig};
use crate::landmark::{
    dselect, dselect_landmarks, dselect_multiclass, random_landmarks, random_pairs, LandmarkSet,
    SelectionMode,
};
use crate::seed;
use crate::trainer::{LossFunction, TrainOptions, DEFAULT_C_GRID};
use crate::transfer::{TransferFamily, TransferFunction};

/// Report format tag.
pub const REPORT_VERSION: &str = "v1";
/// Two-sided significance level of the pairwise tests.
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Singleton landmarks with raw similarities, picked at random.
    #[serde(rename = "bbs")]
    Bbs,
    /// Singleton landmarks picked by diversity selection.
    #[serde(rename = "bbs+d")]
    BbsD,
    /// Random pairs with the clipped identity transfer.
    #[serde(rename = "bbs-pairs")]
    BbsPairs,
    /// Random pairs with the sign transfer.
    #[serde(rename = "sign-baseline")]
    SignBaseline,
    #[serde(rename = "ftune-s")]
    FtuneS,
    /// FTUNE-S on pairs drawn from diversity-selected landmarks.
    #[serde(rename = "ftune-s+d")]
    FtuneSD,
    #[serde(rename = "ftune-m")]
    FtuneM,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Bbs,
        Method::BbsD,
        Method::BbsPairs,
        Method::SignBaseline,
        Method::FtuneS,
        Method::FtuneSD,
        Method::FtuneM,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Bbs => "bbs",
            Method::BbsD => "bbs+d",
            Method::BbsPairs => "bbs-pairs",
            Method::SignBaseline => "sign-baseline",
            Method::FtuneS => "ftune-s",
            Method::FtuneSD => "ftune-s+d",
            Method::FtuneM => "ftune-m",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

fn default_c_grid() -> Vec<f64> {
    DEFAULT_C_GRID.to_vec()
}

fn default_loss() -> LossFunction {
    LossFunction::hinge(1.0)
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataPaths,
    pub kernel: KernelSpec,
    pub methods: Vec<Method>,
    pub landmarks: Vec<usize>,
    pub runs: usize,
    /// Split fractions. The seed field is not used: every run derives its
    /// split seed from `master_seed`.
    pub split: SplitSpec,
    #[serde(default = "default_c_grid")]
    pub c_grid: Vec<f64>,
    #[serde(default = "TransferFamily::default_family")]
    pub family: TransferFamily,
    pub master_seed: u64,
    #[serde(default = "default_loss")]
    pub loss: LossFunction,
    #[serde(default = "default_true")]
    pub bias: bool,
    #[serde(default)]
    pub selection: SelectionMode,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods listed".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::Config(format!("method {m} listed twice")));
            }
        }
        if self.landmarks.is_empty() || self.landmarks.contains(&0) {
            return Err(Error::Config(
                "landmark counts must be positive and non-empty".into(),
            ));
        }
        if self.c_grid.is_empty() || self.c_grid.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(Error::Config("c_grid must hold positive penalties".into()));
        }
        if !self.loss.is_lipschitz() {
            return Err(Error::Config(
                "training loss must be hinge or logistic".into(),
            ));
        }
        self.split
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        ExperimentConfig::from_json_str(&text)
    }

    fn ftune_config(&self) -> FtuneConfig {
        FtuneConfig {
            family: self.family.clone(),
            loss: self.loss,
            c_grid: self.c_grid.clone(),
            train: TrainOptions {
                use_bias: self.bias,
                ..TrainOptions::default()
            },
        }
    }
}

/// Data paths with relative entries resolved against `base`.
pub fn resolve_paths(paths: &DataPaths, base: &Path) -> DataPaths {
    let fix = |p: &PathBuf| {
        if p.is_relative() {
            base.join(p)
        } else {
            p.clone()
        }
    };
    DataPaths {
        features: paths.features.as_ref().map(fix),
        similarity: paths.similarity.as_ref().map(fix),
        labels: fix(&paths.labels),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub run: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub method: Method,
    pub landmarks: usize,
    /// Test accuracies of the successful runs, in run order.
    pub accuracies: Vec<f64>,
    /// `None` when no run succeeded.
    pub mean: Option<f64>,
    /// Sample standard deviation; zero for a single run.
    pub std: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<RunFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub method_a: Method,
    pub method_b: Method,
    pub landmarks: usize,
    /// `None` when infinite (zero variance, different means).
    pub statistic: Option<f64>,
    pub p: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub cells: Vec<Cell>,
    pub ttests: Vec<TTest>,
    /// Some cell has no successful run.
    pub degraded: bool,
}

impl ExperimentReport {
    pub fn cell(&self, method: Method, landmarks: usize) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.landmarks == landmarks)
    }
}

/// Sample mean and standard deviation (`n − 1` denominator; zero for one
/// value).
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, var.sqrt()))
}

/// Welch's two-sample t-test with Welch–Satterthwaite degrees of freedom and
/// a two-sided p-value. When both samples have zero variance, `p` is 1 for
/// equal means and 0 otherwise.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<(Option<f64>, f64, bool)> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Argument(format!(
            "t-test needs two values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (ma, sa) = mean_std(a).expect("non-empty");
    let (mb, sb) = mean_std(b).expect("non-empty");
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (qa, qb) = (sa * sa / na, sb * sb / nb);
    let se2 = qa + qb;
    if se2 == 0.0 {
        return Ok(if ma == mb {
            (Some(0.0), 1.0, false)
        } else {
            (None, 0.0, true)
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    let p = beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0);
    Ok((Some(t), p, p < SIGNIFICANCE))
}

/// Outcome of one `(run, method, d)` evaluation.
type CellOutcome = std::result::Result<f64, String>;

struct RunContext<'a> {
    cfg: &'a ExperimentConfig,
    ftune: FtuneConfig,
    kernel: Kernel<'a>,
    splits: Splits,
    run_seed: u64,
}

impl RunContext<'_> {
    fn landmark_seed(&self, d: usize) -> u64 {
        seed::derive(seed::derive_named(self.run_seed, "landmarks"), d as u64)
    }

    fn train_seed(&self) -> u64 {
        seed::derive_named(self.run_seed, "train")
    }

    fn dataset(&self) -> &Dataset {
        self.kernel.dataset()
    }

    fn evaluate(&self, method: Method, d: usize) -> Result<f64> {
        let ds = self.dataset();
        let Splits { train, valid, test } = &self.splits;
        let lseed = self.landmark_seed(d);
        let tseed = self.train_seed();
        let mode = self.cfg.selection;
        let k = &self.kernel;
        match method {
            Method::Bbs => {
                let landmarks = random_landmarks(train, d, lseed)?;
                self.singletons(&landmarks)
            }
            Method::BbsD => {
                let landmarks = if ds.is_binary() {
                    dselect_landmarks(k, train, d, lseed, mode)?
                } else {
                    dselect_multiclass(k, ds, train, d, lseed, mode)?
                };
                self.singletons(&landmarks)
            }
            Method::BbsPairs | Method::SignBaseline | Method::FtuneS => {
                let cfg = match method {
                    Method::BbsPairs => self.ftune.fixed(TransferFunction::Identity),
                    Method::SignBaseline => self.ftune.fixed(TransferFunction::Sign),
                    _ => self.ftune.clone(),
                };
                let result = if ds.is_binary() {
                    let pairs = random_pairs(&ds.binary_labels()?, train, d, lseed)?;
                    ftune_binary(k, train, valid, &pairs, &cfg, tseed)?
                } else {
                    ftune_s_multiclass(k, train, valid, train, d, &cfg, lseed)?
                };
                result.accuracy(k, test)
            }
            Method::FtuneSD => {
                let result = if ds.is_binary() {
                    let (_, pairs) = dselect(k, train, &ds.binary_labels()?, d, lseed, mode)?;
                    ftune_binary(k, train, valid, &pairs, &self.ftune, tseed)?
                } else {
                    let pool = dselect_multiclass(k, ds, train, d, lseed, mode)?;
                    ftune_s_multiclass(k, train, valid, pool.ids(), d, &self.ftune, lseed)?
                };
                result.accuracy(k, test)
            }
            Method::FtuneM => {
                ftune_m(k, train, valid, train, d, &self.ftune, lseed)?.accuracy(k, test)
            }
        }
    }

    fn singletons(&self, landmarks: &LandmarkSet) -> Result<f64> {
        let Splits { train, valid, test } = &self.splits;
        fit_singletons(
            &self.kernel,
            train,
            valid,
            landmarks,
            &self.ftune,
            self.train_seed(),
        )?
        .accuracy(&self.kernel, test)
    }
}

fn run_once(
    cfg: &ExperimentConfig,
    dataset: &Dataset,
    r: usize,
    cells: &[(Method, usize)],
) -> Vec<CellOutcome> {
    let run_seed = seed::derive(cfg.master_seed, r as u64);
    let setup = (|| -> Result<RunContext<'_>> {
        let spec = SplitSpec {
            seed: seed::derive_named(run_seed, "split"),
            ..cfg.split
        };
        let splits = split(dataset, &spec)?;
        let kernel = Kernel::fit(&cfg.kernel, dataset, &splits.train)?;
        Ok(RunContext {
            cfg,
            ftune: cfg.ftune_config(),
            kernel,
            splits,
            run_seed,
        })
    })();
    match setup {
        Err(e) => {
            log::warn!("run {r}: setup failed: {e}");
            vec![Err(e.to_string()); cells.len()]
        }
        Ok(ctx) => cells
            .par_iter()
            .map(|&(m, d)| {
                ctx.evaluate(m, d).map_err(|e| {
                    log::debug!("run {r}, {m} at d = {d}: {e}");
                    e.to_string()
                })
            })
            .collect(),
    }
}

/// Loads the configured dataset (paths relative to the working directory)
/// and runs the experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let dataset = load_dataset(&cfg.data)?;
    run_experiment_on(cfg, &dataset)
}

/// Runs the experiment on an already-loaded dataset.
pub fn run_experiment_on(cfg: &ExperimentConfig, dataset: &Dataset) -> Result<ExperimentReport> {
    cfg.validate()?;
    let cells: Vec<(Method, usize)> = cfg
        .methods
        .iter()
        .flat_map(|&m| cfg.landmarks.iter().map(move |&d| (m, d)))
        .collect();
    let outcomes: Vec<Vec<CellOutcome>> = (0..cfg.runs)
        .into_par_iter()
        .map(|r| run_once(cfg, dataset, r, &cells))
        .collect();

    let cells: Vec<Cell> = cells
        .iter()
        .enumerate()
        .map(|(c, &(method, landmarks))| {
            let mut accuracies = Vec::new();
            let mut failures = Vec::new();
            for (run, per_run) in outcomes.iter().enumerate() {
                match &per_run[c] {
                    Ok(a) => accuracies.push(*a),
                    Err(e) => failures.push(RunFailure {
                        run,
                        error: e.clone(),
                    }),
                }
            }
            let stats = mean_std(&accuracies);
            Cell {
                method,
                landmarks,
                mean: stats.map(|s| s.0),
                std: stats.map(|s| s.1),
                accuracies,
                failures,
            }
        })
        .collect();

    let mut ttests = Vec::new();
    for &d in &cfg.landmarks {
        for (i, &a) in cfg.methods.iter().enumerate() {
            for &b in &cfg.methods[i + 1..] {
                let find = |m: Method| {
                    cells
                        .iter()
                        .find(|c| c.method == m && c.landmarks == d)
                        .expect("cell exists")
                };
                if let Ok((statistic, p, significant)) =
                    welch_t_test(&find(a).accuracies, &find(b).accuracies)
                {
                    ttests.push(TTest {
                        method_a: a,
                        method_b: b,
                        landmarks: d,
                        statistic,
                        p,
                        significant,
                    });
                }
            }
        }
    }
    let degraded = cells.iter().any(|c| c.accuracies.is_empty());
    Ok(ExperimentReport {
        version: REPORT_VERSION.into(),
        config: cfg.clone(),
        cells,
        ttests,
        degraded,
    })
}

/// Path of the per-run CSV written next to a JSON report.
pub fn csv_path(json_path: &Path) -> PathBuf {
    json_path.with_extension("csv")
}

/// Writes the report as JSON at `path` and a `method,landmarks,run,accuracy`
/// CSV next to it (failed runs leave the accuracy blank).
pub fn emit_report(report: &ExperimentReport, path: &Path) -> Result<()> {
    std::fs::write(path, report_json(report)?)?;
    let mut w = csv::Writer::from_path(csv_path(path)).map_err(csv_error)?;
    w.write_record(["method", "landmarks", "run", "accuracy"])
        .map_err(csv_error)?;
    for cell in &report.cells {
        let mut ok = cell.accuracies.iter();
        for run in 0..report.config.runs {
            let acc = if cell.failures.iter().any(|f| f.run == run) {
                String::new()
            } else {
                ok.next().map(|a| a.to_string()).unwrap_or_default()
            };
            w.write_record([
                cell.method.name(),
                &cell.landmarks.to_string(),
                &run.to_string(),
                &acc,
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

/// Pretty JSON with a trailing newline.
pub fn report_json(report: &ExperimentReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn read_report(path: &Path) -> Result<ExperimentReport> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub method: Method,
    pub landmarks: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

/// Accuracy-versus-landmarks rows sorted by method name, then landmark
/// count.
pub fn curve_data(report: &ExperimentReport) -> Result<Vec<CurveRow>> {
    let mut ds: Vec<usize> = report.cells.iter().map(|c| c.landmarks).collect();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() < 2 {
        return Err(Error::Argument(
            "a curve needs at least two landmark counts".into(),
        ));
    }
    let mut rows: Vec<CurveRow> = report
        .cells
        .iter()
        .map(|c| CurveRow {
            method: c.method,
            landmarks: c.landmarks,
            mean: c.mean,
            std: c.std,
        })
        .collect();
    rows.sort_by(|a, b| {
        a.method
            .name()
            .cmp(b.method.name())
            .then(a.landmarks.cmp(&b.landmarks))
    });
    Ok(rows)
}

/// Writes curve rows as `method,landmarks,mean,std` CSV.
pub fn write_curve_csv(rows: &[CurveRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(["method", "landmarks", "mean", "std"])
        .map_err(csv_error)?;
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.method.name(),
            &r.landmarks.to_string(),
            &fmt(r.mean),
            &fmt(r.std),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Process exit status for an error: 2 for configuration problems, 3 for
/// data problems, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Json(_) => 2,
        Error::Io(_)
        | Error::Format(_)
        | Error::Parse { .. }
        | Error::DegenerateDataset(_)
        | Error::Stratification(_) => 3,
        _ => 1,
    }
}

/// Exit status for a finished report: 0, or 4 when degraded.
pub fn report_exit_code(report: &ExperimentReport) -> i32 {
    if report.degraded {
        4
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn config(methods: Vec<Method>, landmarks: Vec<usize>, runs: usize) -> ExperimentConfig {
        ExperimentConfig {
            data: DataPaths::default(),
            kernel: KernelSpec::gaussian(None),
            methods,
            landmarks,
            runs,
            split: SplitSpec::new(0.5, 0.25, 0.25, 0),
            c_grid: vec![1.0, 10.0],
            family: "ramp:1,10,100".parse().unwrap(),
            master_seed: 11,
            loss: LossFunction::hinge(1.0),
            bias: true,
            selection: SelectionMode::Similarity,
        }
    }

    #[test]
    fn welch_examples() {
        let a = [0.8, 0.9, 0.85, 0.7];
        let (t, p, sig) = welch_t_test(&a, &a).unwrap();
        assert_eq!((t, p, sig), (Some(0.0), 1.0, false));
        let (t, p, sig) = welch_t_test(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((t, p, sig), (None, 0.0, true));
        let (_, p, sig) = welch_t_test(&[2.1, 2.0, 1.9, 2.2], &[1.1, 1.0, 0.9, 1.2]).unwrap();
        assert!(p < 0.001 && sig);
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn welch_symmetry() {
        let a = [0.1, 0.4, 0.35, 0.2, 0.3];
        let b = [0.5, 0.45, 0.6, 0.52];
        let (tab, pab, _) = welch_t_test(&a, &b).unwrap();
        let (tba, pba, _) = welch_t_test(&b, &a).unwrap();
        assert_eq!(tab.unwrap(), -tba.unwrap());
        assert_eq!(pab, pba);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(
                serde_json::to_string(&m).unwrap(),
                format!("\"{}\"", m.name())
            );
        }
        assert!("svm".parse::<Method>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = config(vec![Method::Bbs], vec![5], 1);
        assert!(c.validate().is_ok());
        c.runs = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = config(vec![], vec![5], 1);
        assert!(c.validate().is_err());
        let c = config(vec![Method::Bbs], vec![0], 1);
        assert!(c.validate().is_err());
        assert!(matches!(
            ExperimentConfig::from_json_str("{"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn single_cell_shape_and_determinism() {
        let ds = synth::multimodal_clusters(80, 2, 3).unwrap();
        let cfg = config(vec![Method::FtuneS], vec![6], 1);
        let a = run_experiment_on(&cfg, &ds).unwrap();
        assert_eq!(a.cells.len(), 1);
        assert_eq!(a.cells[0].accuracies.len(), 1);
        assert_eq!(a.cells[0].std, Some(0.0));
        assert!(a.ttests.is_empty());
        let b = run_experiment_on(&cfg, &ds).unwrap();
        assert_eq!(report_json(&a).unwrap(), report_json(&b).unwrap());
    }

    #[test]
    fn every_method_runs_on_binary_and_multiclass() {
        let bin = synth::multimodal_clusters(120, 2, 4).unwrap();
        let cfg = config(Method::ALL.to_vec(), vec![6, 10], 2);
        let r = run_experiment_on(&cfg, &bin).unwrap();
        assert!(
            !r.degraded,
            "{:?}",
            r.cells.iter().flat_map(|c| &c.failures).collect::<Vec<_>>()
        );
        for c in &r.cells {
            assert!(c.accuracies.iter().all(|a| (0.0..=1.0).contains(a)));
        }
        assert_eq!(r.ttests.len(), 2 * 21);

        let multi = synth::mixed_multiclass(90, 1).unwrap();
        let mut cfg = config(Method::ALL.to_vec(), vec![9], 2);
        cfg.kernel = KernelSpec::precomputed();
        let r = run_experiment_on(&cfg, &multi).unwrap();
        assert!(
            !r.degraded,
            "{:?}",
            r.cells.iter().flat_map(|c| &c.failures).collect::<Vec<_>>()
        );
    }

    #[test]
    fn identity_family_reproduces_pair_baseline() {
        let ds = synth::multimodal_clusters(100, 2, 8).unwrap();
        let mut cfg = config(vec![Method::FtuneS, Method::BbsPairs], vec![5, 8], 3);
        cfg.family = TransferFamily::new(vec![TransferFunction::Identity]).unwrap();
        let r = run_experiment_on(&cfg, &ds).unwrap();
        for d in [5, 8] {
            assert_eq!(
                r.cell(Method::FtuneS, d).unwrap().accuracies,
                r.cell(Method::BbsPairs, d).unwrap().accuracies
            );
        }
    }

    #[test]
    fn failures_mark_the_report_degraded() {
        let ds = synth::multimodal_clusters(40, 2, 1).unwrap();
        // more singleton landmarks than training points
        let cfg = config(vec![Method::Bbs], vec![500], 2);
        let r = run_experiment_on(&cfg, &ds).unwrap();
        assert!(r.degraded);
        assert_eq!(r.cells[0].failures.len(), 2);
        assert_eq!(r.cells[0].mean, None);
        assert_eq!(report_exit_code(&r), 4);
    }

    #[test]
    fn curve_rows() {
        let ds = synth::multimodal_clusters(80, 2, 2).unwrap();
        let cfg = config(
            vec![Method::SignBaseline, Method::BbsPairs],
            vec![8, 4, 6],
            2,
        );
        let r = run_experiment_on(&cfg, &ds).unwrap();
        let rows = curve_data(&r).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].method, Method::BbsPairs);
        assert_eq!(
            rows.iter().map(|r| r.landmarks).collect::<Vec<_>>(),
            vec![4, 6, 8, 4, 6, 8]
        );
        for row in &rows {
            assert_eq!(row.mean, r.cell(row.method, row.landmarks).unwrap().mean);
        }
        let one = config(vec![Method::BbsPairs], vec![4], 1);
        let r1 = run_experiment_on(&one, &ds).unwrap();
        assert!(curve_data(&r1).is_err());
    }
}
