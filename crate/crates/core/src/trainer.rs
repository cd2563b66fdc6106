//! Linear classifiers over the landmarked space.
//!
//! Hinge training minimizes `½‖v‖² + C·Σᵢ max(0, 1 − yᵢ⟨v, zᵢ⟩)` by dual
//! coordinate descent; logistic training minimizes
//! `½‖v‖² + C·Σᵢ log(1 + exp(−yᵢ⟨v, zᵢ⟩))` by gradient descent with a
//! backtracking line search. With the bias enabled, `zᵢ` carries an extra
//! constant-1 coordinate whose weight is regularized like the others.
//!
//! A trained [`LinearModel`] stores `weights = d·v` so that its decision
//! value is `(1/d)·⟨weights, row⟩ + bias`.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{sign_label, EmbeddedDataset};
use crate::error::{Error, Result};
use crate::seed;

/// `{1, 10, 100, 1000}`.
pub const DEFAULT_C_GRID: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Hinge,
    Logistic,
    ZeroOne,
    MarginIndicator,
}

/// A loss on the signed margin `t = y·g(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossFunction {
    pub kind: LossKind,
    /// `γ` for hinge (`max(0, 1 − t/γ)`) and margin-indicator (`1[t < γ]`).
    pub margin: f64,
}

impl LossFunction {
    pub fn hinge(margin: f64) -> Self {
        LossFunction {
            kind: LossKind::Hinge,
            margin,
        }
    }

    pub fn logistic() -> Self {
        LossFunction {
            kind: LossKind::Logistic,
            margin: 1.0,
        }
    }

    pub fn zero_one() -> Self {
        LossFunction {
            kind: LossKind::ZeroOne,
            margin: 0.0,
        }
    }

    pub fn margin_indicator(margin: f64) -> Self {
        LossFunction {
            kind: LossKind::MarginIndicator,
            margin,
        }
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        match self.kind {
            LossKind::Hinge => (1.0 - t / self.margin).max(0.0),
            LossKind::Logistic => log1p_exp(-t),
            LossKind::ZeroOne => f64::from(u8::from(t <= 0.0)),
            LossKind::MarginIndicator => f64::from(u8::from(t < self.margin)),
        }
    }

    /// `C_L`; zero for the indicator losses, which are not Lipschitz.
    pub fn lipschitz_constant(&self) -> f64 {
        match self.kind {
            LossKind::Hinge => 1.0 / self.margin,
            LossKind::Logistic => 1.0,
            LossKind::ZeroOne | LossKind::MarginIndicator => 0.0,
        }
    }

    pub fn is_lipschitz(&self) -> bool {
        matches!(self.kind, LossKind::Hinge | LossKind::Logistic)
    }
}

/// `log(1 + eˣ)` without overflow.
#[inline]
fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `1 / (1 + e⁻ˣ)`.
#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ModelRecord", try_from = "ModelRecord")]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub loss_kind: LossKind,
    pub c_penalty: f64,
}

/// On-disk form: `{weights, bias, loss_kind, c_penalty, d}`.
#[derive(Serialize, Deserialize)]
struct ModelRecord {
    weights: Vec<f64>,
    bias: f64,
    loss_kind: LossKind,
    c_penalty: f64,
    d: usize,
}

impl From<LinearModel> for ModelRecord {
    fn from(m: LinearModel) -> Self {
        ModelRecord {
            d: m.weights.len(),
            weights: m.weights,
            bias: m.bias,
            loss_kind: m.loss_kind,
            c_penalty: m.c_penalty,
        }
    }
}

impl TryFrom<ModelRecord> for LinearModel {
    type Error = String;

    fn try_from(r: ModelRecord) -> std::result::Result<Self, String> {
        if r.weights.len() != r.d {
            return Err(format!(
                "model has {} weights but d = {}",
                r.weights.len(),
                r.d
            ));
        }
        Ok(LinearModel {
            weights: r.weights,
            bias: r.bias,
            loss_kind: r.loss_kind,
            c_penalty: r.c_penalty,
        })
    }
}

impl LinearModel {
    pub fn new(weights: Vec<f64>, bias: f64, loss_kind: LossKind, c_penalty: f64) -> Self {
        LinearModel {
            weights,
            bias,
            loss_kind,
            c_penalty,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub(crate) fn decision_unchecked(&self, row: &[f64]) -> f64 {
        let dot: f64 = self.weights.iter().zip(row).map(|(w, z)| w * z).sum();
        dot / self.weights.len() as f64 + self.bias
    }

    fn check(&self, embedded: &EmbeddedDataset) -> Result<()> {
        if embedded.dim() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                got: embedded.dim(),
            });
        }
        Ok(())
    }

    /// Decision values for every embedded row.
    pub fn decision_values(&self, embedded: &EmbeddedDataset) -> Result<Vec<f64>> {
        self.check(embedded)?;
        Ok((0..embedded.len())
            .map(|i| self.decision_unchecked(embedded.row(i)))
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    /// Append a constant-1 feature (regularized bias).
    pub use_bias: bool,
    /// Stop hinge training once the largest projected-gradient magnitude
    /// over a full pass is at most this.
    pub kkt_tol: f64,
    pub max_epochs: usize,
    /// Stop logistic training once `‖∇‖₂` is at most this.
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            use_bias: true,
            kkt_tol: 1e-3,
            max_epochs: 1000,
            grad_tol: 1e-4,
            max_iters: 20_000,
        }
    }
}

/// Diagnostics from a training call.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Internal solution `v` (with the bias weight last when enabled).
    pub raw: Vec<f64>,
    /// Dual objective after each hinge epoch (empty for logistic).
    pub dual_objectives: Vec<f64>,
    /// Final max |projected gradient| (hinge) or gradient norm (logistic).
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// The regularized training objectives on an embedded sample, as functions
/// of the internal weight vector `v`.
pub struct Objective<'a> {
    embedded: &'a EmbeddedDataset,
    use_bias: bool,
    c: f64,
}

impl<'a> Objective<'a> {
    pub fn new(embedded: &'a EmbeddedDataset, use_bias: bool, c: f64) -> Self {
        Objective {
            embedded,
            use_bias,
            c,
        }
    }

    /// Dimension of `v`.
    pub fn dim(&self) -> usize {
        self.embedded.dim() + usize::from(self.use_bias)
    }

    #[inline]
    fn margin(&self, v: &[f64], i: usize) -> f64 {
        let row = self.embedded.row(i);
        let mut s: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
        if self.use_bias {
            s += v[row.len()];
        }
        f64::from(self.embedded.labels()[i]) * s
    }

    fn norm_sq(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum()
    }

    pub fn hinge_primal(&self, v: &[f64]) -> f64 {
        let loss: f64 = (0..self.embedded.len())
            .map(|i| (1.0 - self.margin(v, i)).max(0.0))
            .sum();
        0.5 * Self::norm_sq(v) + self.c * loss
    }

    pub fn logistic(&self, v: &[f64]) -> f64 {
        let loss: f64 = (0..self.embedded.len())
            .map(|i| log1p_exp(-self.margin(v, i)))
            .sum();
        0.5 * Self::norm_sq(v) + self.c * loss
    }

    pub fn logistic_gradient(&self, v: &[f64]) -> Vec<f64> {
        let mut g = v.to_vec();
        let d = self.embedded.dim();
        for i in 0..self.embedded.len() {
            let y = f64::from(self.embedded.labels()[i]);
            let coef = -self.c * y * sigmoid(-self.margin(v, i));
            let row = self.embedded.row(i);
            for (gj, zj) in g[..d].iter_mut().zip(row) {
                *gj += coef * zj;
            }
            if self.use_bias {
                g[d] += coef;
            }
        }
        g
    }
}

fn check_trainable(embedded: &EmbeddedDataset) -> Result<()> {
    let labels = embedded.labels();
    let has_pos = labels.contains(&1);
    let has_neg = labels.contains(&-1);
    if !(has_pos && has_neg) {
        return Err(Error::Degenerate(format!(
            "training needs both labels; got {} positives and {} negatives",
            labels.iter().filter(|&&y| y == 1).count(),
            labels.iter().filter(|&&y| y == -1).count()
        )));
    }
    if embedded.dim() == 0 {
        return Err(Error::Degenerate("embedding has no coordinates".into()));
    }
    Ok(())
}

/// Trains with default [`TrainOptions`].
pub fn train(
    embedded: &EmbeddedDataset,
    loss: &LossFunction,
    c_penalty: f64,
    seed: u64,
) -> Result<LinearModel> {
    train_with(embedded, loss, c_penalty, seed, &TrainOptions::default()).map(|(m, _)| m)
}

pub fn train_with(
    embedded: &EmbeddedDataset,
    loss: &LossFunction,
    c_penalty: f64,
    seed: u64,
    opts: &TrainOptions,
) -> Result<(LinearModel, TrainReport)> {
    if !(c_penalty > 0.0 && c_penalty.is_finite()) {
        return Err(Error::Argument(format!(
            "penalty C must be positive, got {c_penalty}"
        )));
    }
    check_trainable(embedded)?;
    let report = match loss.kind {
        LossKind::Hinge => hinge_dcd(embedded, c_penalty, seed, opts),
        LossKind::Logistic => logistic_gd(embedded, c_penalty, opts),
        other => {
            return Err(Error::Argument(format!(
                "cannot train with non-Lipschitz loss {other:?}"
            )))
        }
    }?;
    if report.raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(
            "training produced non-finite weights".into(),
        ));
    }
    let d = embedded.dim();
    let scale = d as f64;
    let model = LinearModel {
        weights: report.raw[..d].iter().map(|v| v * scale).collect(),
        bias: if opts.use_bias { report.raw[d] } else { 0.0 },
        loss_kind: loss.kind,
        c_penalty,
    };
    Ok((model, report))
}

fn hinge_dcd(
    embedded: &EmbeddedDataset,
    c: f64,
    seed: u64,
    opts: &TrainOptions,
) -> Result<TrainReport> {
    let n = embedded.len();
    let d = embedded.dim();
    let bias = f64::from(u8::from(opts.use_bias));
    let labels = embedded.labels();
    let q_diag: Vec<f64> = (0..n)
        .map(|i| embedded.row(i).iter().map(|z| z * z).sum::<f64>() + bias * bias)
        .collect();

    let mut alpha = vec![0.0; n];
    let mut v = vec![0.0; d + usize::from(opts.use_bias)];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = seed::rng(seed);
    let mut dual_objectives = Vec::new();

    let grad = |v: &[f64], i: usize| -> f64 {
        let row = embedded.row(i);
        let mut s: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
        s += bias * v.get(d).copied().unwrap_or(0.0);
        f64::from(labels[i]) * s - 1.0
    };
    let projected = |g: f64, a: f64| -> f64 {
        if a <= 0.0 {
            g.min(0.0)
        } else if a >= c {
            g.max(0.0)
        } else {
            g
        }
    };

    let mut residual = f64::INFINITY;
    let mut epochs = 0;
    while epochs < opts.max_epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let g = grad(&v, i);
            if projected(g, alpha[i]) == 0.0 {
                continue;
            }
            let old = alpha[i];
            // a zero row makes the dual linear in αᵢ with slope 1 > 0
            let new = if q_diag[i] > 0.0 {
                (old - g / q_diag[i]).clamp(0.0, c)
            } else {
                c
            };
            let step = (new - old) * f64::from(labels[i]);
            if step != 0.0 {
                for (vj, zj) in v[..d].iter_mut().zip(embedded.row(i)) {
                    *vj += step * zj;
                }
                if opts.use_bias {
                    v[d] += step * bias;
                }
                alpha[i] = new;
            }
        }
        epochs += 1;
        let norm_sq: f64 = v.iter().map(|x| x * x).sum();
        let dual = alpha.iter().sum::<f64>() - 0.5 * norm_sq;
        if !dual.is_finite() {
            return Err(Error::Numeric("dual objective is not finite".into()));
        }
        dual_objectives.push(dual);
        residual = (0..n)
            .map(|i| projected(grad(&v, i), alpha[i]).abs())
            .fold(0.0, f64::max);
        if residual <= opts.kkt_tol {
            break;
        }
    }
    Ok(TrainReport {
        raw: v,
        dual_objectives,
        residual,
        iterations: epochs,
        converged: residual <= opts.kkt_tol,
    })
}

fn logistic_gd(embedded: &EmbeddedDataset, c: f64, opts: &TrainOptions) -> Result<TrainReport> {
    let obj = Objective::new(embedded, opts.use_bias, c);
    let mut v = vec![0.0; obj.dim()];
    let mut value = obj.logistic(&v);
    let mut step = 1.0;
    let mut residual = f64::INFINITY;
    let mut iters = 0;
    while iters < opts.max_iters {
        let g = obj.logistic_gradient(&v);
        let g_sq: f64 = g.iter().map(|x| x * x).sum();
        residual = g_sq.sqrt();
        if !residual.is_finite() || !value.is_finite() {
            return Err(Error::Numeric("logistic objective is not finite".into()));
        }
        if residual <= opts.grad_tol {
            break;
        }
        // Armijo backtracking, restarting from twice the last accepted step
        step *= 2.0;
        let mut candidate: Vec<f64>;
        loop {
            candidate = v.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let cand_value = obj.logistic(&candidate);
            if cand_value <= value - 0.5 * step * g_sq {
                value = cand_value;
                break;
            }
            step *= 0.5;
            if step < 1e-300 {
                return Err(Error::Numeric("line search failed to make progress".into()));
            }
        }
        v = candidate;
        iters += 1;
    }
    Ok(TrainReport {
        raw: v,
        dual_objectives: Vec::new(),
        residual,
        iterations: iters,
        converged: residual <= opts.grad_tol,
    })
}

/// Mean loss of `L(y·g(x))` over the embedded sample.
pub fn eval_loss(
    model: &LinearModel,
    embedded: &EmbeddedDataset,
    loss: &LossFunction,
) -> Result<f64> {
    let values = model.decision_values(embedded)?;
    if values.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = values
        .iter()
        .zip(embedded.labels())
        .map(|(&g, &y)| loss.value(f64::from(y) * g))
        .sum();
    Ok(total / values.len() as f64)
}

/// Fraction of rows whose predicted label matches.
pub fn accuracy(model: &LinearModel, embedded: &EmbeddedDataset) -> Result<f64> {
    let values = model.decision_values(embedded)?;
    if values.is_empty() {
        return Ok(0.0);
    }
    let correct = values
        .iter()
        .zip(embedded.labels())
        .filter(|(&g, &y)| sign_label(g) == y)
        .count();
    Ok(correct as f64 / values.len() as f64)
}

/// The model chosen by validation, with its scores.
#[derive(Debug, Clone, PartialEq)]
pub struct CSelection {
    pub model: LinearModel,
    pub c: f64,
    pub valid_accuracy: f64,
    /// Validation loss under the training loss (hinge at margin 1, or
    /// logistic).
    pub valid_loss: f64,
}

/// Trains one model per penalty in `grid` and keeps the one with the best
/// validation accuracy; ties go to the smallest C.
pub fn select_c(
    train_embedded: &EmbeddedDataset,
    valid_embedded: &EmbeddedDataset,
    loss: &LossFunction,
    grid: &[f64],
    seed: u64,
    opts: &TrainOptions,
) -> Result<CSelection> {
    if grid.is_empty() {
        return Err(Error::Argument("penalty grid is empty".into()));
    }
    let eval = match loss.kind {
        LossKind::Hinge => LossFunction::hinge(1.0),
        _ => *loss,
    };
    let candidates = grid
        .par_iter()
        .map(|&c| -> Result<CSelection> {
            let (model, _) = train_with(train_embedded, loss, c, seed, opts)?;
            Ok(CSelection {
                valid_accuracy: accuracy(&model, valid_embedded)?,
                valid_loss: eval_loss(&model, valid_embedded, &eval)?,
                model,
                c,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = candidates
        .into_iter()
        .reduce(|best, cand| {
            let better = cand.valid_accuracy > best.valid_accuracy
                || (cand.valid_accuracy == best.valid_accuracy && cand.c < best.c);
            if better {
                cand
            } else {
                best
            }
        })
        .expect("grid is non-empty");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::LandmarkSource;
    use crate::landmark::LandmarkSet;
    use crate::matrix::Matrix;
    use rand::Rng;

    fn embedded(rows: Vec<Vec<f64>>, labels: Vec<i8>) -> EmbeddedDataset {
        let m = Matrix::from_rows(&rows);
        let d = m.cols();
        let source = LandmarkSource::Singletons(LandmarkSet::new((0..d).collect()).unwrap());
        EmbeddedDataset::from_parts(m, labels, source).unwrap()
    }

    fn no_bias() -> TrainOptions {
        TrainOptions {
            use_bias: false,
            ..TrainOptions::default()
        }
    }

    #[test]
    fn one_dimensional_hinge_matches_grid_oracle() {
        let e = embedded(vec![vec![-1.0], vec![1.0]], vec![-1, 1]);
        // oracle: scan w in [-3, 3] at step 1e-3
        let objective = |w: f64| 0.5 * w * w + (1.0 - w).max(0.0) + (1.0 - w).max(0.0);
        let (best_w, best_obj) = (0..=6000)
            .map(|k| -3.0 + k as f64 * 1e-3)
            .map(|w| (w, objective(w)))
            .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        assert!((best_w - 1.0).abs() < 1e-9);
        assert!((best_obj - 0.5).abs() < 1e-12);

        let (model, report) =
            train_with(&e, &LossFunction::hinge(1.0), 1.0, 0, &no_bias()).unwrap();
        assert!((model.weights[0] - 1.0).abs() < 1e-3, "{model:?}");
        let obj = Objective::new(&e, false, 1.0).hinge_primal(&report.raw);
        assert!((obj - 0.5).abs() < 1e-3);
        assert!(report.converged);
    }

    #[test]
    fn single_class_is_degenerate() {
        let e = embedded(vec![vec![1.0], vec![0.5]], vec![1, 1]);
        assert!(matches!(
            train(&e, &LossFunction::hinge(1.0), 1.0, 0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn rejects_indicator_losses_and_bad_c() {
        let e = embedded(vec![vec![1.0], vec![-0.5]], vec![1, -1]);
        assert!(train(&e, &LossFunction::zero_one(), 1.0, 0).is_err());
        assert!(train(&e, &LossFunction::hinge(1.0), 0.0, 0).is_err());
    }

    fn blobs(seed_value: u64, n: usize, gap: f64) -> EmbeddedDataset {
        let mut rng = seed::rng(seed_value);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let y: i8 = if i % 2 == 0 { 1 } else { -1 };
            let cx = f64::from(y) * gap;
            rows.push(vec![
                cx + rng.gen_range(-0.2..0.2),
                rng.gen_range(-0.5..0.5),
            ]);
            labels.push(y);
        }
        embedded(rows, labels)
    }

    #[test]
    fn separable_blobs_have_no_training_errors() {
        for s in 0..5 {
            let e = blobs(s, 40, 0.5);
            for loss in [LossFunction::hinge(1.0), LossFunction::logistic()] {
                let m = train(&e, &loss, 100.0, s).unwrap();
                assert_eq!(accuracy(&m, &e).unwrap(), 1.0, "{loss:?}");
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let e = blobs(3, 60, 0.1);
        let a = train(&e, &LossFunction::hinge(1.0), 10.0, 7).unwrap();
        let b = train(&e, &LossFunction::hinge(1.0), 10.0, 7).unwrap();
        assert_eq!(a, b);
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn dual_objective_never_decreases() {
        for s in 0..10 {
            let e = blobs(s, 50, 0.05);
            let opts = TrainOptions::default();
            let (_, report) = train_with(&e, &LossFunction::hinge(1.0), 10.0, s, &opts).unwrap();
            for w in report.dual_objectives.windows(2) {
                assert!(w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0), "{w:?}");
            }
        }
    }

    #[test]
    fn eval_loss_examples() {
        let e = embedded(vec![vec![1.0], vec![-1.0]], vec![1, -1]);
        let perfect = LinearModel::new(vec![1.0], 0.0, LossKind::Hinge, 1.0);
        assert_eq!(
            eval_loss(&perfect, &e, &LossFunction::zero_one()).unwrap(),
            0.0
        );
        let zero = LinearModel::new(vec![0.0], 0.0, LossKind::Hinge, 1.0);
        assert_eq!(
            eval_loss(&zero, &e, &LossFunction::hinge(1.0)).unwrap(),
            1.0
        );

        let one = embedded(vec![vec![0.5]], vec![1]);
        let m = LinearModel::new(vec![1.0], 0.0, LossKind::Hinge, 1.0);
        assert_eq!(
            eval_loss(&m, &one, &LossFunction::margin_indicator(0.6)).unwrap(),
            1.0
        );
        let wrong_dim = LinearModel::new(vec![1.0, 2.0], 0.0, LossKind::Hinge, 1.0);
        assert!(matches!(
            eval_loss(&wrong_dim, &e, &LossFunction::zero_one()),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn accuracy_examples() {
        let e = embedded(vec![vec![1.0], vec![-1.0]], vec![1, -1]);
        let right = LinearModel::new(vec![1.0], 0.0, LossKind::Hinge, 1.0);
        let wrong = LinearModel::new(vec![-1.0], 0.0, LossKind::Hinge, 1.0);
        let half = LinearModel::new(vec![0.0], 1.0, LossKind::Hinge, 1.0);
        assert_eq!(accuracy(&right, &e).unwrap(), 1.0);
        assert_eq!(accuracy(&wrong, &e).unwrap(), 0.0);
        assert_eq!(accuracy(&half, &e).unwrap(), 0.5);
    }

    #[test]
    fn select_c_grid_rules() {
        let e = blobs(1, 30, 0.5);
        let v = blobs(2, 20, 0.5);
        let opts = TrainOptions::default();
        let hinge = LossFunction::hinge(1.0);
        let single = select_c(&e, &v, &hinge, &[10.0], 0, &opts).unwrap();
        assert_eq!(single.c, 10.0);
        // separable data: every C reaches accuracy 1, so the smallest wins
        let best = select_c(&e, &v, &hinge, &[100.0, 1.0, 10.0], 0, &opts).unwrap();
        assert_eq!(best.valid_accuracy, 1.0);
        assert_eq!(best.c, 1.0);
        assert!(select_c(&e, &v, &hinge, &[], 0, &opts).is_err());
        assert_eq!(DEFAULT_C_GRID, [1.0, 10.0, 100.0, 1000.0]);
    }

    #[test]
    fn model_json_record() {
        let m = LinearModel::new(vec![0.5, -1.0], 0.25, LossKind::Logistic, 10.0);
        let json = serde_json::to_value(&m).unwrap();
        assert_eq!(json["d"], 2);
        assert_eq!(json["loss_kind"], "logistic");
        let back: LinearModel = serde_json::from_value(json).unwrap();
        assert_eq!(back, m);
        let bad = serde_json::json!({"weights": [1.0], "bias": 0.0, "loss_kind": "hinge", "c_penalty": 1.0, "d": 3});
        assert!(serde_json::from_value::<LinearModel>(bad).is_err());
    }

    #[test]
    fn loss_constants() {
        assert_eq!(LossFunction::hinge(0.5).lipschitz_constant(), 2.0);
        assert_eq!(LossFunction::hinge(0.5).value(0.25), 0.5);
        assert!(!LossFunction::zero_one().is_lipschitz());
        assert_eq!(LossFunction::zero_one().lipschitz_constant(), 0.0);
        assert!((LossFunction::logistic().value(0.0) - 2f64.ln()).abs() < 1e-15);
        assert!(LossFunction::logistic().value(-800.0).is_finite());
    }
}
