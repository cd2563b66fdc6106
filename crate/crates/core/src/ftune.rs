//! Transfer-function search.
//!
//! Every member of the family is tried on a fixed set of landmark pairs: the
//! train and validation splits are embedded with it, a penalty is picked with
//! [`select_c`], and the member with the best validation accuracy wins.
//! Ties go to the lower validation loss, then to the smaller slope.
//!
//! FTUNE-S uses one transfer for the whole task. For multiclass data it runs
//! one-vs-all problems that share the transfer and is scored on multiclass
//! validation accuracy. FTUNE-M tunes a separate transfer per one-vs-all
//! problem. Multiclass prediction is the argmax of the raw per-class decision
//! values, ties going to the smallest class id.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{BinaryLabels, Dataset, Kernel};
use crate::embedding::{embed_pairs, embed_singletons, sign_label};
use crate::error::{Error, Result};
use crate::landmark::{pairs_from_pool, LandmarkPairSet, LandmarkSet};
use crate::seed;
use crate::trainer::{
    select_c, CSelection, LinearModel, LossFunction, TrainOptions, DEFAULT_C_GRID,
};
use crate::transfer::{TransferFamily, TransferFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtuneConfig {
    pub family: TransferFamily,
    pub loss: LossFunction,
    pub c_grid: Vec<f64>,
    pub train: TrainOptions,
}

impl Default for FtuneConfig {
    fn default() -> Self {
        FtuneConfig {
            family: TransferFamily::default_family(),
            loss: LossFunction::hinge(1.0),
            c_grid: DEFAULT_C_GRID.to_vec(),
            train: TrainOptions::default(),
        }
    }
}

impl FtuneConfig {
    /// Same settings with the family replaced by `{f}`.
    pub fn fixed(&self, f: TransferFunction) -> Self {
        FtuneConfig {
            family: TransferFamily::new(vec![f]).expect("one member"),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FtuneVariant {
    S,
    M,
}

/// Outcome of one family member on the validation split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationScore {
    pub transfer: TransferFunction,
    pub accuracy: Option<f64>,
    pub loss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ValidationScore {
    fn failed(transfer: TransferFunction, err: &Error) -> Self {
        ValidationScore {
            transfer,
            accuracy: None,
            loss: None,
            c: None,
            error: Some(err.to_string()),
        }
    }
}

/// A tuned binary problem: the chosen transfer, its pairs and model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryFtune {
    pub chosen: TransferFunction,
    pub model: LinearModel,
    pub c: f64,
    pub pairs: LandmarkPairSet,
    pub valid_accuracy: f64,
    pub valid_loss: f64,
    pub validation_scores: Vec<ValidationScore>,
}

impl BinaryFtune {
    /// Decision values for `ids` under the chosen transfer.
    pub fn decision_values(&self, kernel: &Kernel<'_>, ids: &[usize]) -> Result<Vec<f64>> {
        let labels = BinaryLabels(vec![1; kernel.dataset().len()]);
        let e = embed_pairs(kernel, &self.pairs, self.chosen, ids, &labels)?;
        self.model.decision_values(&e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtuneResult {
    pub variant: FtuneVariant,
    pub num_classes: usize,
    /// One problem for binary FTUNE-S, otherwise one per class (class id
    /// order), each trained as that class against the rest.
    pub problems: Vec<BinaryFtune>,
    /// Accuracy on the validation split of the full predictor.
    pub valid_accuracy: f64,
    /// The table the shared transfer was selected from (FTUNE-S); FTUNE-M
    /// keeps its tables inside each problem.
    pub validation_scores: Vec<ValidationScore>,
}

impl FtuneResult {
    pub fn chosen(&self) -> Vec<TransferFunction> {
        self.problems.iter().map(|p| p.chosen).collect()
    }

    pub fn models(&self) -> Vec<&LinearModel> {
        self.problems.iter().map(|p| &p.model).collect()
    }

    fn one_vs_all(&self) -> bool {
        self.problems.len() > 1
    }

    /// Dense class ids predicted for `ids`.
    pub fn predict(&self, kernel: &Kernel<'_>, ids: &[usize]) -> Result<Vec<usize>> {
        if !self.one_vs_all() {
            let values = self.problems[0].decision_values(kernel, ids)?;
            return Ok(values
                .into_iter()
                .map(|g| usize::from(sign_label(g) == 1))
                .collect());
        }
        let per_class = self
            .problems
            .iter()
            .map(|p| p.decision_values(kernel, ids))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..ids.len())
            .map(|i| argmax_class(per_class.iter().map(|v| v[i])))
            .collect())
    }

    /// Fraction of `ids` whose predicted class matches.
    pub fn accuracy(&self, kernel: &Kernel<'_>, ids: &[usize]) -> Result<f64> {
        let predicted = self.predict(kernel, ids)?;
        Ok(class_accuracy(kernel.dataset(), ids, &predicted))
    }
}

/// Index of the largest value; ties go to the smallest index.
pub fn argmax_class(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (k, v) in values.into_iter().enumerate() {
        if v > best_value || k == 0 {
            best = k;
            best_value = v;
        }
    }
    best
}

fn class_accuracy(dataset: &Dataset, ids: &[usize], predicted: &[usize]) -> f64 {
    if ids.is_empty() {
        return 0.0;
    }
    let hits = ids
        .iter()
        .zip(predicted)
        .filter(|(&i, &p)| dataset.class_of(i) == p)
        .count();
    hits as f64 / ids.len() as f64
}

/// Multiclass prediction with a tuned result; see [`FtuneResult::predict`].
pub fn predict_multiclass(
    result: &FtuneResult,
    kernel: &Kernel<'_>,
    ids: &[usize],
) -> Result<Vec<usize>> {
    result.predict(kernel, ids)
}

/// The singleton-landmark baseline: raw similarities to `d` landmarks as
/// features, one model per class for multiclass data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingletonFit {
    pub landmarks: LandmarkSet,
    /// One model for binary data, otherwise one per class.
    pub models: Vec<LinearModel>,
    pub c: Vec<f64>,
    pub valid_accuracy: f64,
}

impl SingletonFit {
    pub fn predict(&self, kernel: &Kernel<'_>, ids: &[usize]) -> Result<Vec<usize>> {
        let any = BinaryLabels(vec![1; kernel.dataset().len()]);
        let e = embed_singletons(kernel, &self.landmarks, ids, &any)?;
        let per_class = self
            .models
            .iter()
            .map(|m| m.decision_values(&e))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..ids.len())
            .map(|i| {
                if per_class.len() == 1 {
                    usize::from(sign_label(per_class[0][i]) == 1)
                } else {
                    argmax_class(per_class.iter().map(|v| v[i]))
                }
            })
            .collect())
    }

    pub fn accuracy(&self, kernel: &Kernel<'_>, ids: &[usize]) -> Result<f64> {
        let predicted = self.predict(kernel, ids)?;
        Ok(class_accuracy(kernel.dataset(), ids, &predicted))
    }
}

/// Fits the singleton baseline; class `c` trains with seed `derive(seed, c)`.
pub fn fit_singletons(
    kernel: &Kernel<'_>,
    train: &[usize],
    valid: &[usize],
    landmarks: &LandmarkSet,
    cfg: &FtuneConfig,
    seed_value: u64,
) -> Result<SingletonFit> {
    let ds = kernel.dataset();
    let problems: Vec<BinaryLabels> = if ds.is_binary() {
        vec![ds.binary_labels()?]
    } else {
        (0..ds.num_classes()).map(|c| ds.one_vs_all(c)).collect()
    };
    let mut models = Vec::with_capacity(problems.len());
    let mut cs = Vec::with_capacity(problems.len());
    for (c, labels) in problems.iter().enumerate() {
        let tr = embed_singletons(kernel, landmarks, train, labels)?;
        let va = embed_singletons(kernel, landmarks, valid, labels)?;
        let sel = select_c(
            &tr,
            &va,
            &cfg.loss,
            &cfg.c_grid,
            seed::derive(seed_value, c as u64),
            &cfg.train,
        )?;
        models.push(sel.model);
        cs.push(sel.c);
    }
    let mut fit = SingletonFit {
        landmarks: landmarks.clone(),
        models,
        c: cs,
        valid_accuracy: 0.0,
    };
    fit.valid_accuracy = fit.accuracy(kernel, valid)?;
    Ok(fit)
}

/// Trains with a single transfer on fixed pairs and selects the penalty on
/// the validation split.
#[allow(clippy::too_many_arguments)]
pub fn fit_fixed(
    kernel: &Kernel<'_>,
    train: &[usize],
    valid: &[usize],
    labels: &BinaryLabels,
    pairs: &LandmarkPairSet,
    f: TransferFunction,
    cfg: &FtuneConfig,
    seed: u64,
) -> Result<CSelection> {
    let train_e = embed_pairs(kernel, pairs, f, train, labels)?;
    let valid_e = embed_pairs(kernel, pairs, f, valid, labels)?;
    select_c(&train_e, &valid_e, &cfg.loss, &cfg.c_grid, seed, &cfg.train)
}

/// `a` is preferred over `b`: higher accuracy, then lower loss, then
/// smaller slope.
fn prefer(a: (f64, f64, f64), b: (f64, f64, f64)) -> bool {
    match a.0.partial_cmp(&b.0) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => a.1 < b.1 || (a.1 == b.1 && a.2 < b.2),
    }
}

/// Index of the preferred candidate among successful ones.
fn select_best(keys: &[Option<(f64, f64, f64)>]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, key) in keys.iter().enumerate() {
        if let Some(k) = key {
            if best.is_none_or(|b| prefer(*k, keys[b].expect("successful"))) {
                best = Some(i);
            }
        }
    }
    best
}

fn aggregate(scores: &[ValidationScore]) -> Error {
    Error::Aggregate(
        scores
            .iter()
            .map(|s| format!("{}: {}", s.transfer, s.error.as_deref().unwrap_or("failed")))
            .collect(),
    )
}

/// FTUNE-S on a binary problem with fixed pairs.
#[allow(clippy::too_many_arguments)]
pub fn ftune_s(
    kernel: &Kernel<'_>,
    train: &[usize],
    valid: &[usize],
    labels: &BinaryLabels,
    pairs: &LandmarkPairSet,
    cfg: &FtuneConfig,
    seed: u64,
) -> Result<BinaryFtune> {
    let outcomes: Vec<Result<CSelection>> = cfg
        .family
        .members()
        .par_iter()
        .map(|&f| fit_fixed(kernel, train, valid, labels, pairs, f, cfg, seed))
        .collect();
    let scores: Vec<ValidationScore> = cfg
        .family
        .members()
        .iter()
        .zip(&outcomes)
        .map(|(&f, o)| match o {
            Ok(sel) => ValidationScore {
                transfer: f,
                accuracy: Some(sel.valid_accuracy),
                loss: Some(sel.valid_loss),
                c: Some(sel.c),
                error: None,
            },
            Err(e) => ValidationScore::failed(f, e),
        })
        .collect();
    let keys: Vec<_> = cfg
        .family
        .members()
        .iter()
        .zip(&outcomes)
        .map(|(f, o)| {
            o.as_ref()
                .ok()
                .map(|s| (s.valid_accuracy, s.valid_loss, f.slope()))
        })
        .collect();
    let best = select_best(&keys).ok_or_else(|| aggregate(&scores))?;
    let sel = outcomes
        .into_iter()
        .nth(best)
        .expect("index in range")
        .expect("successful");
    Ok(BinaryFtune {
        chosen: cfg.family.members()[best],
        model: sel.model,
        c: sel.c,
        pairs: pairs.clone(),
        valid_accuracy: sel.valid_accuracy,
        valid_loss: sel.valid_loss,
        validation_scores: scores,
    })
}

/// Binary FTUNE-S packaged as an [`FtuneResult`].
pub fn ftune_binary(
    kernel: &Kernel<'_>,
    train: &[usize],
    valid: &[usize],
    pairs: &LandmarkPairSet,
    cfg: &FtuneConfig,
    seed: u64,
) -> Result<FtuneResult> {
    let labels = kernel.dataset().binary_labels()?;
    let problem = ftune_s(kernel, train, valid, &labels, pairs, cfg, seed)?;
    Ok(FtuneResult {
        variant: FtuneVariant::S,
        num_classes: 2,
        valid_accuracy: problem.valid_accuracy,
        validation_scores: problem.validation_scores.clone(),
        problems: vec![problem],
    })
}

/// One-vs-all labels and pairs for every class; pairs for class `k` are
/// drawn from `pool` with seed `derive(seed, k)`.
fn class_problems(
    dataset: &Dataset,
    train: &[usize],
    pool: &[usize],
    d: usize,
    seed: u64,
) -> Result<Vec<(BinaryLabels, LandmarkPairSet)>> {
    let k = dataset.num_classes();
    if k < 2 {
        return Err(Error::Argument("need at least two classes".into()));
    }
    let counts = dataset.class_counts(train);
    if let Some(c) = counts.iter().position(|&n| n == 0) {
        return Err(Error::Stratification(format!(
            "class {c} has no training points"
        )));
    }
    (0..k)
        .map(|c| {
            let labels = dataset.one_vs_all(c);
            let pairs = pairs_from_pool(pool, &labels, d, seed::derive(seed, c as u64))?;
            Ok((labels, pairs))
        })
        .collect()
}

/// FTUNE-M: an independent transfer search per one-vs-all problem.
#[allow(clippy::too_many_arguments)]
pub fn ftune_m(
    kernel: &Kernel<'_>,
    train: &[usize],
    valid: &[usize],
    pool: &[usize],
    d: usize,
    cfg: &FtuneConfig,
    seed: u64,
) -> Result<FtuneResult> {
    let dataset = kernel.dataset();
    let problems = class_problems(dataset, train, pool, d, seed)?;
    let tuned = problems
        .par_iter()
        .enumerate()
        .map(|(c, (labels, pairs))| {
            ftune_s(
                kernel,
                train,
                valid,
                labels,
                pairs,
                cfg,
                seed::derive(seed, c as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut result = FtuneResult {
        variant: FtuneVariant::M,
        num_classes: dataset.num_classes(),
        problems: tuned,
        valid_accuracy: 0.0,
        validation_scores: Vec::new(),
    };
    result.valid_accuracy = result.accuracy(kernel, valid)?;
    Ok(result)
}

/// FTUNE-S over one-vs-all problems sharing a single transfer, selected by
/// multiclass validation accuracy (ties: lower mean validation loss, then
/// smaller slope).
#[allow(clippy::too_many_arguments)]
pub fn ftune_s_multiclass(
    kernel: &Kernel<'_>,
    train: &[usize],
    valid: &[usize],
    pool: &[usize],
    d: usize,
    cfg: &FtuneConfig,
    seed: u64,
) -> Result<FtuneResult> {
    let dataset = kernel.dataset();
    let problems = class_problems(dataset, train, pool, d, seed)?;
    let members = cfg.family.members();
    let outcomes: Vec<Result<FtuneResult>> = members
        .par_iter()
        .map(|&f| {
            let fixed = cfg.fixed(f);
            let tuned = problems
                .iter()
                .enumerate()
                .map(|(c, (labels, pairs))| {
                    ftune_s(
                        kernel,
                        train,
                        valid,
                        labels,
                        pairs,
                        &fixed,
                        seed::derive(seed, c as u64),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let mut r = FtuneResult {
                variant: FtuneVariant::S,
                num_classes: dataset.num_classes(),
                problems: tuned,
                valid_accuracy: 0.0,
                validation_scores: Vec::new(),
            };
            r.valid_accuracy = r.accuracy(kernel, valid)?;
            Ok(r)
        })
        .collect();
    let mean_loss = |r: &FtuneResult| {
        r.problems.iter().map(|p| p.valid_loss).sum::<f64>() / r.problems.len() as f64
    };
    let scores: Vec<ValidationScore> = members
        .iter()
        .zip(&outcomes)
        .map(|(&f, o)| match o {
            Ok(r) => ValidationScore {
                transfer: f,
                accuracy: Some(r.valid_accuracy),
                loss: Some(mean_loss(r)),
                c: None,
                error: None,
            },
            Err(e) => ValidationScore::failed(f, e),
        })
        .collect();
    let keys: Vec<_> = members
        .iter()
        .zip(&outcomes)
        .map(|(f, o)| {
            o.as_ref()
                .ok()
                .map(|r| (r.valid_accuracy, mean_loss(r), f.slope()))
        })
        .collect();
    let best = select_best(&keys).ok_or_else(|| aggregate(&scores))?;
    let mut result = outcomes
        .into_iter()
        .nth(best)
        .expect("index in range")
        .expect("successful");
    result.validation_scores = scores;
    Ok(result)
}
