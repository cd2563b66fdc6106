//! Empirical goodness of a similarity function, planted instances that are
//! good by construction, and Monte-Carlo checks of the landmark-sampling
//! bounds.
//!
//! For a point `x` the pair goodness value is the empirical conditional mean
//!
//! ```text
//! G(x) = mean over x' with ℓ(x') = ℓ(x), x'' with ℓ(x'') ≠ ℓ(x) of
//!        w(x', x'') · f(K(x, x') − K(x, x''))
//! ```
//!
//! and `x` violates the margin when `G(x) < C_f·γ`, where `C_f` is the
//! spread of `f` over the observed kernel values. Empirical distributions
//! stand in for the data distribution: `x'` ranges over every point of
//! `x`'s class, `x` included.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{BinaryLabels, Dataset, Kernel, KernelSpec};
use crate::embedding::margin_error;
use crate::error::{Error, Result};
use crate::landmark::random_pairs;
use crate::matrix::Matrix;
use crate::seed;
use crate::trainer::LossFunction;
use crate::transfer::{spread, TransferFunction};

/// Above this many `(x', x'')` pairs per point the conditional mean is
/// estimated from a seeded sample of this size.
pub const MAX_ENUMERATED_PAIRS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessParams {
    pub epsilon: f64,
    pub gamma: f64,
    pub b_bound: f64,
    pub epsilon_one: f64,
    pub delta: f64,
}

impl GoodnessParams {
    pub fn new(
        epsilon: f64,
        gamma: f64,
        b_bound: f64,
        epsilon_one: f64,
        delta: f64,
    ) -> Result<Self> {
        let p = GoodnessParams {
            epsilon,
            gamma,
            b_bound,
            epsilon_one,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.epsilon,
            self.gamma,
            self.b_bound,
            self.epsilon_one,
            self.delta,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("goodness parameters must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Argument(format!(
                "epsilon {} outside [0, 1]",
                self.epsilon
            )));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::Argument(format!(
                "gamma {} outside (0, 1]",
                self.gamma
            )));
        }
        if self.b_bound <= 0.0 || self.epsilon_one <= 0.0 {
            return Err(Error::Argument("B and epsilon_one must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Argument(format!(
                "delta {} outside (0, 1)",
                self.delta
            )));
        }
        Ok(())
    }

    /// Pairs needed for margin error `ε + ε₁` at margin `γ/2` with
    /// probability `1 − δ`: `⌈(8/γ²)·ln(2/(δ·ε₁))⌉`.
    pub fn margin_bound_landmarks(&self) -> usize {
        let d = 8.0 / (self.gamma * self.gamma) * (2.0 / (self.delta * self.epsilon_one)).ln();
        d.ceil().max(1.0) as usize
    }

    /// Pairs needed for surrogate loss `ε + ε₁` with probability `1 − δ`
    /// under a `C_L`-Lipschitz loss: `⌈(16·B²·C_L²/ε₁²)·ln(4B/(δ·ε₁))⌉`.
    pub fn surrogate_bound_landmarks(&self, c_l: f64) -> usize {
        let b = self.b_bound;
        let e1 = self.epsilon_one;
        let d = 16.0 * b * b * c_l * c_l / (e1 * e1) * (4.0 * b / (self.delta * e1)).ln();
        d.ceil().max(1.0) as usize
    }
}

/// Weights on landmark pairs, `w(x', x'')`, indexed by point id.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction {
    Constant(f64),
    Table(Matrix),
    /// `w(x', x'') = u(x')·u(x'')`.
    Product(Vec<f64>),
}

impl WeightFunction {
    #[inline]
    pub fn eval(&self, a: usize, b: usize) -> f64 {
        match self {
            WeightFunction::Constant(v) => *v,
            WeightFunction::Table(m) => m[(a, b)],
            WeightFunction::Product(u) => u[a] * u[b],
        }
    }

    /// `sup |w|`.
    pub fn bound(&self) -> f64 {
        match self {
            WeightFunction::Constant(v) => v.abs(),
            WeightFunction::Table(m) => m.max_abs(),
            WeightFunction::Product(u) => {
                let m = u.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                m * m
            }
        }
    }

    pub fn check_bound(&self, b_bound: f64) -> Result<()> {
        let b = self.bound();
        if b.is_finite() && b <= b_bound {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "weights reach {b}, above the bound {b_bound}"
            )))
        }
    }

    fn check_size(&self, n: usize) -> Result<()> {
        let ok = match self {
            WeightFunction::Constant(_) => true,
            WeightFunction::Table(m) => m.rows() >= n && m.cols() >= n,
            WeightFunction::Product(u) => u.len() >= n,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "weight function does not cover {n} points"
            )))
        }
    }

    /// Every weight multiplied by `s`.
    pub fn scaled(&self, s: f64) -> WeightFunction {
        match self {
            WeightFunction::Constant(v) => WeightFunction::Constant(v * s),
            WeightFunction::Table(m) => WeightFunction::Table(m.map(|v| v * s)),
            WeightFunction::Product(u) => {
                let n = u.len();
                WeightFunction::Table(Matrix::from_fn(n, n, |a, b| s * (u[a] * u[b])))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub max_pairs: usize,
    /// Seed for the per-point samples drawn above `max_pairs`.
    pub seed: u64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            max_pairs: MAX_ENUMERATED_PAIRS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodnessEstimate {
    /// Fraction of points whose value misses the threshold.
    pub violation_fraction: f64,
    /// Per-point values, in the order of the ids passed in.
    pub values: Vec<f64>,
    pub threshold: f64,
    /// Whether any point's mean came from a sample rather than enumeration.
    pub sampled: bool,
}

fn class_split(labels: &BinaryLabels, ids: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let pos = labels.select(ids, 1);
    let neg = labels.select(ids, -1);
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Degenerate(format!(
            "goodness needs both classes; got {} positives and {} negatives",
            pos.len(),
            neg.len()
        )));
    }
    Ok((pos, neg))
}

fn check_ids(dataset: &Dataset, ids: &[usize]) -> Result<()> {
    ids.iter().try_for_each(|&i| dataset.check_index(i))
}

/// Mean of `w(a, b)·h(a, b)` over `a ∈ same`, `b ∈ other`, enumerated in id
/// order, or over a seeded sample of `max_pairs` pairs when the product is
/// larger.
fn conditional_mean(
    same: &[usize],
    other: &[usize],
    opts: &EstimateOptions,
    point: usize,
    term: impl Fn(usize, usize) -> f64,
) -> (f64, bool) {
    let total = same.len() * other.len();
    if total <= opts.max_pairs {
        let mut s = 0.0;
        for &a in same {
            for &b in other {
                s += term(a, b);
            }
        }
        (s / total as f64, false)
    } else {
        let mut rng = seed::rng(seed::derive(opts.seed, point as u64));
        let mut s = 0.0;
        for _ in 0..opts.max_pairs {
            let a = same[rng.gen_range(0..same.len())];
            let b = other[rng.gen_range(0..other.len())];
            s += term(a, b);
        }
        (s / opts.max_pairs as f64, true)
    }
}

fn summarize(
    values: Vec<f64>,
    sampled: bool,
    threshold: f64,
    violates: impl Fn(f64) -> bool,
) -> GoodnessEstimate {
    let bad = values.iter().filter(|&&v| violates(v)).count();
    GoodnessEstimate {
        violation_fraction: bad as f64 / values.len() as f64,
        values,
        threshold,
        sampled,
    }
}

/// `C_f` over the kernel values among `ids` (all ordered pairs, diagonal
/// included).
pub fn observed_c_f(kernel: &Kernel<'_>, ids: &[usize], f: &TransferFunction) -> f64 {
    let (lo, hi) = spread(
        f,
        ids.iter()
            .flat_map(|&i| ids.iter().map(move |&j| kernel.eval(i, j))),
    );
    hi - lo
}

/// Per-point pair goodness values `G(x)` for `x ∈ ids`.
pub fn pair_values(
    kernel: &Kernel<'_>,
    ids: &[usize],
    f: &TransferFunction,
    w: &WeightFunction,
    opts: &EstimateOptions,
) -> Result<(Vec<f64>, bool)> {
    let dataset = kernel.dataset();
    check_ids(dataset, ids)?;
    w.check_size(dataset.len())?;
    let labels = dataset.binary_labels()?;
    let (pos, neg) = class_split(&labels, ids)?;
    let results: Vec<(f64, bool)> = ids
        .par_iter()
        .map(|&x| {
            let (same, other) = if labels.get(x) == 1 {
                (&pos, &neg)
            } else {
                (&neg, &pos)
            };
            conditional_mean(same, other, opts, x, |a, b| {
                w.eval(a, b) * f.apply(kernel.eval(x, a) - kernel.eval(x, b))
            })
        })
        .collect();
    let sampled = results.iter().any(|r| r.1);
    Ok((results.into_iter().map(|r| r.0).collect(), sampled))
}

/// Pair goodness: violation when `G(x) < C_f·γ`.
pub fn estimate_goodness_pairs(
    kernel: &Kernel<'_>,
    ids: &[usize],
    f: &TransferFunction,
    w: &WeightFunction,
    params: &GoodnessParams,
) -> Result<GoodnessEstimate> {
    estimate_goodness_pairs_with(kernel, ids, f, w, params, &EstimateOptions::default())
}

pub fn estimate_goodness_pairs_with(
    kernel: &Kernel<'_>,
    ids: &[usize],
    f: &TransferFunction,
    w: &WeightFunction,
    params: &GoodnessParams,
    opts: &EstimateOptions,
) -> Result<GoodnessEstimate> {
    if ids.len() < 3 {
        return Err(Error::Degenerate(format!(
            "need at least 3 points, got {}",
            ids.len()
        )));
    }
    let (values, sampled) = pair_values(kernel, ids, f, w, opts)?;
    let threshold = observed_c_f(kernel, ids, f) * params.gamma;
    Ok(summarize(values, sampled, threshold, |v| v < threshold))
}

/// Singleton goodness: the gap between the `u`-weighted mean similarity to
/// the own class and to the other class; violation when the gap is below
/// `γ`.
pub fn estimate_goodness_bbs(
    kernel: &Kernel<'_>,
    ids: &[usize],
    u: &[f64],
    params: &GoodnessParams,
) -> Result<GoodnessEstimate> {
    let dataset = kernel.dataset();
    check_ids(dataset, ids)?;
    if u.len() < dataset.len() {
        return Err(Error::Argument(format!(
            "{} weights for {} points",
            u.len(),
            dataset.len()
        )));
    }
    let labels = dataset.binary_labels()?;
    let (pos, neg) = class_split(&labels, ids)?;
    let mean = |x: usize, set: &[usize]| {
        set.iter().map(|&a| u[a] * kernel.eval(x, a)).sum::<f64>() / set.len() as f64
    };
    let values: Vec<f64> = ids
        .iter()
        .map(|&x| {
            let (same, other) = if labels.get(x) == 1 {
                (&pos, &neg)
            } else {
                (&neg, &pos)
            };
            mean(x, same) - mean(x, other)
        })
        .collect();
    let gamma = params.gamma;
    Ok(summarize(values, false, gamma, |v| v < gamma))
}

/// Distance-based goodness: the mean of `u(x')·u(x'')·sgn(d(x, x'') −
/// d(x, x'))`; violation unless the value exceeds `γ`.
pub fn estimate_goodness_sign(
    dataset: &Dataset,
    distances: &Matrix,
    ids: &[usize],
    u: &[f64],
    params: &GoodnessParams,
) -> Result<GoodnessEstimate> {
    estimate_goodness_sign_with(
        dataset,
        distances,
        ids,
        u,
        params,
        &EstimateOptions::default(),
    )
}

pub fn estimate_goodness_sign_with(
    dataset: &Dataset,
    distances: &Matrix,
    ids: &[usize],
    u: &[f64],
    params: &GoodnessParams,
    opts: &EstimateOptions,
) -> Result<GoodnessEstimate> {
    check_ids(dataset, ids)?;
    let n = dataset.len();
    if distances.rows() != n || distances.cols() != n {
        return Err(Error::Shape {
            expected: n,
            got: distances.rows(),
        });
    }
    if u.len() < n {
        return Err(Error::Argument(format!(
            "{} weights for {n} points",
            u.len()
        )));
    }
    let labels = dataset.binary_labels()?;
    let (pos, neg) = class_split(&labels, ids)?;
    let sign = TransferFunction::Sign;
    let results: Vec<(f64, bool)> = ids
        .par_iter()
        .map(|&x| {
            let (same, other) = if labels.get(x) == 1 {
                (&pos, &neg)
            } else {
                (&neg, &pos)
            };
            conditional_mean(same, other, opts, x, |a, b| {
                u[a] * u[b] * sign.apply(distances[(x, b)] - distances[(x, a)])
            })
        })
        .collect();
    let sampled = results.iter().any(|r| r.1);
    let gamma = params.gamma;
    Ok(summarize(
        results.into_iter().map(|r| r.0).collect(),
        sampled,
        gamma,
        |v| v <= gamma,
    ))
}

/// Mean surrogate loss `L(G(x))` over `ids`, with `G` fully enumerated.
pub fn estimate_surrogate_goodness(
    kernel: &Kernel<'_>,
    ids: &[usize],
    f: &TransferFunction,
    w: &WeightFunction,
    loss: &LossFunction,
) -> Result<f64> {
    if !loss.is_lipschitz() {
        return Err(Error::Argument(format!(
            "{:?} loss is not Lipschitz",
            loss.kind
        )));
    }
    let opts = EstimateOptions {
        max_pairs: usize::MAX,
        seed: 0,
    };
    let (values, _) = pair_values(kernel, ids, f, w, &opts)?;
    Ok(values.iter().map(|&g| loss.value(g)).sum::<f64>() / values.len() as f64)
}

/// A planted instance with its goodness witnesses.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub dataset: Dataset,
    pub weights: WeightFunction,
    pub transfer: TransferFunction,
}

/// Largest uniform noise amplitude the planted construction accepts for
/// margin `γ`.
pub fn max_plant_noise(gamma: f64) -> f64 {
    (1.0 - gamma) / 2.0
}

/// Two interleaved classes (`i` even → `+1`) with within-class similarity
/// `s_w = γ + η`, cross-class similarity `s_c = −(γ + η)` and symmetric
/// off-diagonal noise uniform in `[−η, η]`, so every similarity difference
/// `K(x, same) − K(x, other)` is at least `2γ`. With `w ≡ 1` and the
/// clipped identity no point violates the margin.
///
/// Requires `n ≥ 4` even, `γ ≤ 1/2` and `0 ≤ η ≤ (1 − γ)/2`, which keeps
/// every similarity in `[−1, 1]`.
pub fn plant_good_similarity(
    n: usize,
    params: &GoodnessParams,
    noise: f64,
    noise_seed: u64,
) -> Result<PlantedInstance> {
    params.validate()?;
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Construction(format!("need an even n ≥ 4, got {n}")));
    }
    let gamma = params.gamma;
    if gamma > 0.5 {
        return Err(Error::Construction(format!(
            "margin {gamma} is above 1/2; clipped differences cannot reach it"
        )));
    }
    if !(noise >= 0.0 && noise <= max_plant_noise(gamma)) {
        return Err(Error::Construction(format!(
            "noise {noise} outside [0, {}] for margin {gamma}",
            max_plant_noise(gamma)
        )));
    }
    let base = gamma + noise;
    let labels: Vec<i64> = (0..n).map(|i| i64::from(i % 2 == 0)).collect();
    let mut rng = seed::rng(noise_seed);
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = base;
        for j in (i + 1)..n {
            let s = if labels[i] == labels[j] { base } else { -base };
            let e = if noise > 0.0 {
                rng.gen_range(-noise..=noise)
            } else {
                0.0
            };
            m[(i, j)] = s + e;
            m[(j, i)] = s + e;
        }
    }
    Ok(PlantedInstance {
        dataset: Dataset::from_similarity(m, &labels)?,
        weights: WeightFunction::Constant(1.0),
        transfer: TransferFunction::Identity,
    })
}

/// Instance size and noise for the bound checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundOptions {
    pub n: usize,
    /// Defaults to half the admissible maximum.
    pub noise: Option<f64>,
    /// Overrides the prescribed number of pairs.
    pub landmarks: Option<usize>,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            n: 200,
            noise: None,
            landmarks: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: String,
    pub params: GoodnessParams,
    /// Pair count the bound prescribes.
    pub prescribed_landmarks: usize,
    /// Pair count actually drawn.
    pub landmarks: usize,
    pub trials: usize,
    pub n: usize,
    pub noise: f64,
    /// Per-trial goodness `ε` the tolerance is built on.
    pub epsilons: Vec<f64>,
    /// Per-trial margin error or mean loss.
    pub values: Vec<f64>,
    pub failures: usize,
    pub failure_fraction: f64,
    /// `2δ`.
    pub allowed_failure_fraction: f64,
    pub pass: bool,
}

struct Trial {
    dataset: Dataset,
    weights: WeightFunction,
    transfer: TransferFunction,
    pair_seed: u64,
}

fn plant_trial(
    params: &GoodnessParams,
    opts: &BoundOptions,
    master_seed: u64,
    t: usize,
) -> Result<Trial> {
    let trial_seed = seed::derive(master_seed, t as u64);
    let noise = opts.noise.unwrap_or(max_plant_noise(params.gamma) / 2.0);
    let inst = plant_good_similarity(
        opts.n,
        params,
        noise,
        seed::derive_named(trial_seed, "plant"),
    )?;
    Ok(Trial {
        dataset: inst.dataset,
        weights: inst.weights,
        transfer: inst.transfer,
        pair_seed: seed::derive_named(trial_seed, "pairs"),
    })
}

/// `g(x) = (1/d)·Σⱼ w(x⁺ⱼ, x⁻ⱼ)·f(K(x, x⁺ⱼ) − K(x, x⁻ⱼ))` with `d` random
/// pairs and the planted weights, as `(g(x), ℓ(x))` for every point.
fn planted_classifier(trial: &Trial, kernel: &Kernel<'_>, d: usize) -> Result<Vec<(f64, i8)>> {
    let labels = trial.dataset.binary_labels()?;
    let all: Vec<usize> = (0..trial.dataset.len()).collect();
    let pairs = random_pairs(&labels, &all, d, trial.pair_seed)?;
    Ok(all
        .iter()
        .map(|&x| {
            let s: f64 = pairs
                .pairs()
                .iter()
                .map(|&(p, q)| {
                    trial.weights.eval(p, q)
                        * trial.transfer.apply(kernel.eval(x, p) - kernel.eval(x, q))
                })
                .sum();
            (s / d as f64, labels.get(x))
        })
        .collect())
}

fn finish(
    bound: &str,
    params: &GoodnessParams,
    prescribed: usize,
    d: usize,
    opts: &BoundOptions,
    outcomes: Vec<(f64, f64, bool)>,
) -> BoundReport {
    let trials = outcomes.len();
    let failures = outcomes.iter().filter(|o| o.2).count();
    let failure_fraction = if trials == 0 {
        0.0
    } else {
        failures as f64 / trials as f64
    };
    let allowed = 2.0 * params.delta;
    BoundReport {
        bound: bound.into(),
        params: *params,
        prescribed_landmarks: prescribed,
        landmarks: d,
        trials,
        n: opts.n,
        noise: opts.noise.unwrap_or(max_plant_noise(params.gamma) / 2.0),
        epsilons: outcomes.iter().map(|o| o.0).collect(),
        values: outcomes.iter().map(|o| o.1).collect(),
        failures,
        failure_fraction,
        allowed_failure_fraction: allowed,
        pass: failure_fraction <= allowed,
    }
}

/// Margin bound check: per trial, plant an instance, draw the prescribed
/// number of random pairs, classify with the planted weights and measure
/// the error at margin `γ/2`. A trial fails when that error exceeds
/// `ε + ε₁` (with `ε` the instance's measured violation fraction, never
/// below `params.epsilon`); the check passes when at most `2δ` of trials
/// fail.
pub fn verify_margin_bound(
    params: &GoodnessParams,
    trials: usize,
    master_seed: u64,
    opts: &BoundOptions,
) -> Result<BoundReport> {
    params.validate()?;
    let prescribed = params.margin_bound_landmarks();
    let d = opts.landmarks.unwrap_or(prescribed);
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64, bool)> {
            let trial = plant_trial(params, opts, master_seed, t)?;
            let kernel = Kernel::new(&KernelSpec::precomputed(), &trial.dataset)?;
            let all: Vec<usize> = (0..trial.dataset.len()).collect();
            let eps =
                estimate_goodness_pairs(&kernel, &all, &trial.transfer, &trial.weights, params)?
                    .violation_fraction
                    .max(params.epsilon);
            let values = planted_classifier(&trial, &kernel, d)?;
            let err = margin_error(&values, params.gamma / 2.0);
            Ok((eps, err, err > eps + params.epsilon_one))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("margin", params, prescribed, d, opts, outcomes))
}

/// Surrogate-loss bound check: as [`verify_margin_bound`] but a trial fails
/// when the mean of `L(ℓ(x)·g(x))` exceeds `ε + ε₁`, with `ε` the
/// instance's measured surrogate goodness.
pub fn verify_surrogate_bound(
    params: &GoodnessParams,
    loss: &LossFunction,
    trials: usize,
    master_seed: u64,
    opts: &BoundOptions,
) -> Result<BoundReport> {
    params.validate()?;
    if !loss.is_lipschitz() {
        return Err(Error::Argument(format!(
            "{:?} loss is not Lipschitz",
            loss.kind
        )));
    }
    let prescribed = params.surrogate_bound_landmarks(loss.lipschitz_constant());
    let d = opts.landmarks.unwrap_or(prescribed);
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64, bool)> {
            let trial = plant_trial(params, opts, master_seed, t)?;
            let kernel = Kernel::new(&KernelSpec::precomputed(), &trial.dataset)?;
            let all: Vec<usize> = (0..trial.dataset.len()).collect();
            let eps =
                estimate_surrogate_goodness(&kernel, &all, &trial.transfer, &trial.weights, loss)?;
            let values = planted_classifier(&trial, &kernel, d)?;
            let mean = values
                .iter()
                .map(|&(g, y)| loss.value(f64::from(y) * g))
                .sum::<f64>()
                / values.len() as f64;
            Ok((eps, mean, mean > eps + params.epsilon_one))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("surrogate", params, prescribed, d, opts, outcomes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    /// `max |f(v) − f′(v)|` over the similarity differences encountered.
    pub r: f64,
    pub b_bound: f64,
    pub lipschitz_constant: f64,
    /// `max_x |G_f(x) − G_f′(x)|`.
    pub max_point_gap: f64,
    /// `r·B`.
    pub point_bound: f64,
    pub point_violations: usize,
    pub mean_loss_gap: f64,
    /// `C_L·r·B`.
    pub loss_bound: f64,
    pub point_slack: f64,
    pub loss_slack: f64,
    pub pass: bool,
}

/// Checks that swapping `f` for a transfer within sup-distance `r` moves
/// every fully enumerated `G(x)` by at most `r·B` and the mean loss by at
/// most `C_L·r·B`.
#[allow(clippy::too_many_arguments)]
pub fn verify_lipschitz_perturbation(
    kernel: &Kernel<'_>,
    ids: &[usize],
    f: &TransferFunction,
    f_prime: &TransferFunction,
    w: &WeightFunction,
    loss: &LossFunction,
    b_bound: f64,
) -> Result<PerturbationReport> {
    w.check_bound(b_bound)?;
    if !loss.is_lipschitz() {
        return Err(Error::Argument(format!(
            "{:?} loss is not Lipschitz",
            loss.kind
        )));
    }
    let dataset = kernel.dataset();
    check_ids(dataset, ids)?;
    let labels = dataset.binary_labels()?;
    let (pos, neg) = class_split(&labels, ids)?;
    let opts = EstimateOptions {
        max_pairs: usize::MAX,
        seed: 0,
    };
    let (g_f, _) = pair_values(kernel, ids, f, w, &opts)?;
    let (g_p, _) = pair_values(kernel, ids, f_prime, w, &opts)?;

    let mut r = 0.0_f64;
    for &x in ids {
        let (same, other) = if labels.get(x) == 1 {
            (&pos, &neg)
        } else {
            (&neg, &pos)
        };
        for &a in same {
            for &b in other {
                let v = kernel.eval(x, a) - kernel.eval(x, b);
                r = r.max((f.apply(v) - f_prime.apply(v)).abs());
            }
        }
    }
    let point_bound = r * b_bound;
    let gaps: Vec<f64> = g_f.iter().zip(&g_p).map(|(a, b)| (a - b).abs()).collect();
    let max_point_gap = gaps.iter().fold(0.0_f64, |a, &b| a.max(b));
    let point_violations = gaps.iter().filter(|&&g| g > point_bound).count();
    let mean = |g: &[f64]| g.iter().map(|&v| loss.value(v)).sum::<f64>() / g.len() as f64;
    let mean_loss_gap = (mean(&g_f) - mean(&g_p)).abs();
    let c_l = loss.lipschitz_constant();
    let loss_bound = c_l * r * b_bound;
    Ok(PerturbationReport {
        r,
        b_bound,
        lipschitz_constant: c_l,
        max_point_gap,
        point_bound,
        point_violations,
        mean_loss_gap,
        loss_bound,
        point_slack: point_bound - max_point_gap,
        loss_slack: loss_bound - mean_loss_gap,
        pass: point_violations == 0 && mean_loss_gap <= loss_bound,
    })
}
