//! Dataset ingestion, kernel evaluation and train/validation/test splitting.
//!
//! A [`Dataset`] holds labeled points given as feature vectors, as a
//! precomputed (possibly indefinite, possibly asymmetric) similarity matrix,
//! or both. Labels are canonicalized on load: binary tasks use `{-1, +1}`
//! with the larger original label mapped to `+1`; tasks with more classes use
//! dense class ids `0..num_classes` in ascending order of the original labels.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed;

/// Maximum number of reshuffles before a split gives up on class coverage.
pub const SPLIT_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub index: usize,
    /// Canonical label: `±1` for binary tasks, class id otherwise.
    pub label: i32,
    pub features: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    points: Vec<Point>,
    similarity: Option<Matrix>,
    num_classes: usize,
    original_labels: Vec<i64>,
}

impl Dataset {
    /// Builds a dataset from raw labels and at least one of feature rows or
    /// a square similarity matrix.
    pub fn new(
        features: Option<Vec<Vec<f64>>>,
        similarity: Option<Matrix>,
        raw_labels: &[i64],
    ) -> Result<Self> {
        let n = raw_labels.len();
        if features.is_none() && similarity.is_none() {
            return Err(Error::Format(
                "dataset needs feature vectors or a similarity matrix".into(),
            ));
        }
        if let Some(rows) = &features {
            if rows.len() != n {
                return Err(Error::Format(format!(
                    "{} feature rows but {} labels",
                    rows.len(),
                    n
                )));
            }
            let width = rows.first().map_or(0, Vec::len);
            if width == 0 {
                return Err(Error::Format("feature rows are empty".into()));
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != width {
                    return Err(Error::Format(format!(
                        "feature row {i} has {} columns, expected {width}",
                        row.len()
                    )));
                }
                if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                    return Err(Error::parse(
                        format!("features[{i}][{j}]"),
                        "non-finite value",
                    ));
                }
            }
        }
        if let Some(m) = &similarity {
            if !m.is_square() || m.rows() != n {
                return Err(Error::Format(format!(
                    "similarity matrix is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
            if let Some(k) = m.as_slice().iter().position(|v| !v.is_finite()) {
                return Err(Error::parse(
                    format!("similarity[{}][{}]", k / n, k % n),
                    "non-finite value",
                ));
            }
        }

        let distinct: Vec<i64> = raw_labels
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if distinct.len() < 2 {
            return Err(Error::DegenerateDataset(format!(
                "need at least two classes, found {}",
                distinct.len()
            )));
        }
        let binary = distinct.len() == 2;
        let canonical = |raw: i64| -> i32 {
            let class = distinct.binary_search(&raw).expect("label collected above");
            if binary {
                if class == 1 {
                    1
                } else {
                    -1
                }
            } else {
                class as i32
            }
        };

        let mut feature_rows = features.map(|rows| rows.into_iter());
        let points = raw_labels
            .iter()
            .enumerate()
            .map(|(index, &raw)| Point {
                index,
                label: canonical(raw),
                features: feature_rows.as_mut().and_then(Iterator::next),
            })
            .collect();

        Ok(Dataset {
            points,
            similarity,
            num_classes: distinct.len(),
            original_labels: distinct,
        })
    }

    pub fn from_features(rows: Vec<Vec<f64>>, raw_labels: &[i64]) -> Result<Self> {
        Dataset::new(Some(rows), None, raw_labels)
    }

    pub fn from_similarity(matrix: Matrix, raw_labels: &[i64]) -> Result<Self> {
        Dataset::new(None, Some(matrix), raw_labels)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn similarity(&self) -> Option<&Matrix> {
        self.similarity.as_ref()
    }

    pub fn has_features(&self) -> bool {
        self.points.first().is_some_and(|p| p.features.is_some())
    }

    pub fn features(&self, i: usize) -> Option<&[f64]> {
        self.points.get(i).and_then(|p| p.features.as_deref())
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn is_binary(&self) -> bool {
        self.num_classes == 2
    }

    /// Original label values, indexed by class id.
    pub fn original_labels(&self) -> &[i64] {
        &self.original_labels
    }

    pub fn label(&self, i: usize) -> i32 {
        self.points[i].label
    }

    /// Dense class id in `0..num_classes` (binary: `-1 → 0`, `+1 → 1`).
    pub fn class_of(&self, i: usize) -> usize {
        let label = self.points[i].label;
        if self.is_binary() {
            usize::from(label > 0)
        } else {
            label as usize
        }
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::Index {
                index: i,
                len: self.len(),
            })
        }
    }

    /// `±1` labels of a binary dataset.
    pub fn binary_labels(&self) -> Result<BinaryLabels> {
        if !self.is_binary() {
            return Err(Error::Argument(format!(
                "binary labels requested for a {}-class dataset",
                self.num_classes
            )));
        }
        Ok(BinaryLabels(
            self.points.iter().map(|p| p.label as i8).collect(),
        ))
    }

    /// One-vs-all relabeling: `class → +1`, every other class `→ -1`.
    pub fn one_vs_all(&self, class: usize) -> BinaryLabels {
        BinaryLabels(
            (0..self.len())
                .map(|i| if self.class_of(i) == class { 1 } else { -1 })
                .collect(),
        )
    }

    /// Classes present among `ids`, as a per-class count.
    pub fn class_counts(&self, ids: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &i in ids {
            counts[self.class_of(i)] += 1;
        }
        counts
    }
}

/// `±1` labels indexed by point id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryLabels(pub Vec<i8>);

impl BinaryLabels {
    pub fn new(labels: Vec<i8>) -> Result<Self> {
        if labels.iter().any(|&l| l != 1 && l != -1) {
            return Err(Error::Argument("binary labels must be ±1".into()));
        }
        Ok(BinaryLabels(labels))
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn sign(&self, i: usize) -> f64 {
        f64::from(self.0[i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn select(&self, ids: &[usize], label: i8) -> Vec<usize> {
        ids.iter()
            .copied()
            .filter(|&i| self.0[i] == label)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Precomputed,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Gaussian width σ. When absent it is set to the mean pairwise
    /// Euclidean distance of the points the kernel is fitted on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

impl KernelSpec {
    pub fn precomputed() -> Self {
        KernelSpec {
            kind: KernelKind::Precomputed,
            width: None,
        }
    }

    pub fn gaussian(width: Option<f64>) -> Self {
        KernelSpec {
            kind: KernelKind::Gaussian,
            width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Resolved {
    Precomputed { scale: f64 },
    Gaussian { sigma: f64 },
}

/// A kernel bound to a dataset with its normalization fixed.
///
/// Precomputed matrices are divided by a scale (max absolute entry) and the
/// Gaussian kernel is `exp(-‖xᵢ − xⱼ‖² / (2σ²))`. Both constants are fixed
/// when the kernel is built, so evaluations against held-out points reuse the
/// constants computed on the fitting ids.
#[derive(Debug, Clone, Copy)]
pub struct Kernel<'a> {
    data: &'a Dataset,
    resolved: Resolved,
}

impl<'a> Kernel<'a> {
    /// Kernel with constants computed over the whole dataset.
    pub fn new(spec: &KernelSpec, data: &'a Dataset) -> Result<Self> {
        let all: Vec<usize> = (0..data.len()).collect();
        Kernel::fit(spec, data, &all)
    }

    /// Kernel with constants computed only over `fit_ids` (the training
    /// split), so that held-out points never influence normalization.
    pub fn fit(spec: &KernelSpec, data: &'a Dataset, fit_ids: &[usize]) -> Result<Self> {
        for &i in fit_ids {
            data.check_index(i)?;
        }
        let resolved = match spec.kind {
            KernelKind::Precomputed => {
                let m = data.similarity().ok_or_else(|| {
                    Error::Argument("precomputed kernel needs a similarity matrix".into())
                })?;
                let mut scale = 0.0_f64;
                for &i in fit_ids {
                    for &j in fit_ids {
                        scale = scale.max(m[(i, j)].abs());
                    }
                }
                Resolved::Precomputed {
                    scale: if scale > 0.0 { scale } else { 1.0 },
                }
            }
            KernelKind::Gaussian => {
                if !data.has_features() {
                    return Err(Error::Argument(
                        "gaussian kernel needs feature vectors".into(),
                    ));
                }
                let sigma = match spec.width {
                    Some(w) if w > 0.0 && w.is_finite() => w,
                    Some(w) => {
                        return Err(Error::Argument(format!(
                            "gaussian width must be positive, got {w}"
                        )))
                    }
                    None => gaussian_width(data, fit_ids)?,
                };
                Resolved::Gaussian { sigma }
            }
        };
        Ok(Kernel { data, resolved })
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.data
    }

    /// Gaussian width, if this is a Gaussian kernel.
    pub fn sigma(&self) -> Option<f64> {
        match self.resolved {
            Resolved::Gaussian { sigma } => Some(sigma),
            Resolved::Precomputed { .. } => None,
        }
    }

    /// Normalization scale, if this is a precomputed kernel.
    pub fn scale(&self) -> Option<f64> {
        match self.resolved {
            Resolved::Precomputed { scale } => Some(scale),
            Resolved::Gaussian { .. } => None,
        }
    }

    /// `K(xᵢ, xⱼ)`. Indices are assumed valid; see [`Kernel::try_eval`].
    #[inline]
    pub fn eval(&self, i: usize, j: usize) -> f64 {
        match self.resolved {
            Resolved::Precomputed { scale } => {
                self.data
                    .similarity
                    .as_ref()
                    .expect("checked at construction")[(i, j)]
                    / scale
            }
            Resolved::Gaussian { sigma } => {
                let a = self.data.points[i].features.as_deref().expect("checked");
                let b = self.data.points[j].features.as_deref().expect("checked");
                (-squared_distance(a, b) / (2.0 * sigma * sigma)).exp()
            }
        }
    }

    pub fn try_eval(&self, i: usize, j: usize) -> Result<f64> {
        self.data.check_index(i)?;
        self.data.check_index(j)?;
        Ok(self.eval(i, j))
    }
}

/// Evaluates the normalized kernel between points `i` and `j`, with
/// normalization constants computed over the whole dataset.
pub fn kernel_eval(spec: &KernelSpec, dataset: &Dataset, i: usize, j: usize) -> Result<f64> {
    Kernel::new(spec, dataset)?.try_eval(i, j)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Mean Euclidean distance over all unordered pairs of `ids`.
pub fn gaussian_width(dataset: &Dataset, ids: &[usize]) -> Result<f64> {
    if !dataset.has_features() {
        return Err(Error::Argument(
            "gaussian width needs feature vectors".into(),
        ));
    }
    if ids.len() < 2 {
        return Err(Error::Degenerate(format!(
            "gaussian width needs at least 2 points, got {}",
            ids.len()
        )));
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for (a, &i) in ids.iter().enumerate() {
        dataset.check_index(i)?;
        let xi = dataset.features(i).expect("has features");
        for &j in &ids[a + 1..] {
            let xj = dataset.features(j).expect("has features");
            total += squared_distance(xi, xj).sqrt();
            pairs += 1;
        }
    }
    let mean = total / pairs as f64;
    if mean <= 0.0 {
        return Err(Error::Degenerate(
            "all points identical; mean pairwise distance is zero".into(),
        ));
    }
    Ok(mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_frac: f64,
    pub valid_frac: f64,
    pub test_frac: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_frac: f64, valid_frac: f64, test_frac: f64, seed: u64) -> Self {
        SplitSpec {
            train_frac,
            valid_frac,
            test_frac,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fracs = [self.train_frac, self.valid_frac, self.test_frac];
        if fracs.iter().any(|&f| !(f > 0.0 && f < 1.0)) {
            return Err(Error::Argument(format!(
                "split fractions must lie in (0, 1), got {fracs:?}"
            )));
        }
        let sum: f64 = fracs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Argument(format!(
                "split fractions must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }

    /// `(train, valid, test)` sizes for `n` points: validation and test are
    /// floored and forced to at least one point, train takes the remainder.
    pub fn sizes(&self, n: usize) -> Result<(usize, usize, usize)> {
        self.validate()?;
        let floor = |frac: f64| ((n as f64 * frac) + 1e-9).floor() as usize;
        let valid = floor(self.valid_frac).max(1);
        let test = floor(self.test_frac).max(1);
        if valid + test >= n {
            return Err(Error::Argument(format!(
                "{n} points are too few for three non-empty splits"
            )));
        }
        Ok((n - valid - test, valid, test))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub test: Vec<usize>,
}

/// Random train/validation/test partition, deterministic in `spec.seed`.
///
/// The permutation is redrawn (up to [`SPLIT_RETRIES`] times) until every
/// class appears in the training split. Each returned id list is sorted.
pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<Splits> {
    let n = dataset.len();
    let (n_train, n_valid, _) = spec.sizes(n)?;
    let mut rng = seed::rng(spec.seed);
    let mut ids: Vec<usize> = (0..n).collect();
    for _ in 0..SPLIT_RETRIES {
        ids.shuffle(&mut rng);
        let train = &ids[..n_train];
        if dataset.class_counts(train).iter().all(|&c| c > 0) {
            let mut train = train.to_vec();
            let mut valid = ids[n_train..n_train + n_valid].to_vec();
            let mut test = ids[n_train + n_valid..].to_vec();
            train.sort_unstable();
            valid.sort_unstable();
            test.sort_unstable();
            return Ok(Splits { train, valid, test });
        }
    }
    Err(Error::Stratification(format!(
        "no split with every class in train after {SPLIT_RETRIES} attempts"
    )))
}

/// Where a dataset is read from. At least one of the two data paths is set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DataPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<std::path::PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<std::path::PathBuf>,
    pub labels: std::path::PathBuf,
}

/// Loads a dataset from headerless CSV files and a one-integer-per-line
/// labels file.
pub fn load_dataset(paths: &DataPaths) -> Result<Dataset> {
    let labels = read_labels(&paths.labels)?;
    let features = paths.features.as_deref().map(read_csv_rows).transpose()?;
    let similarity = paths
        .similarity
        .as_deref()
        .map(|p| read_csv_rows(p).map(|rows| Matrix::from_rows(&rows)))
        .transpose()?;
    Dataset::new(features, similarity, &labels)
}

/// Reads a headerless numeric CSV. All rows must have the same width.
pub fn read_csv_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                let v: f64 = field.parse().map_err(|_| {
                    Error::parse(
                        format!("{}:{}:{}", path.display(), r + 1, c + 1),
                        format!("not a number: {field:?}"),
                    )
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::parse(
                        format!("{}:{}:{}", path.display(), r + 1, c + 1),
                        "non-finite value",
                    ))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Format(format!(
                    "{}: row {} has {} columns, expected {}",
                    path.display(),
                    r + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::parse(path.display().to_string(), e.to_string())
    }
}

pub fn read_labels(path: &Path) -> Result<Vec<i64>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(k, line)| {
            line.trim().parse::<i64>().map_err(|_| {
                Error::parse(
                    format!("{}:{}", path.display(), k + 1),
                    format!("not an integer label: {:?}", line.trim()),
                )
            })
        })
        .collect()
}

/// Writes rows as headerless CSV.
pub fn write_csv_rows<'r>(path: &Path, rows: impl IntoIterator<Item = &'r [f64]>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    for row in rows {
        writer
            .write_record(row.iter().map(|v| v.to_string()))
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_labels(path: &Path, labels: &[i64]) -> Result<()> {
    let mut text = String::with_capacity(labels.len() * 3);
    for l in labels {
        text.push_str(&l.to_string());
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}
