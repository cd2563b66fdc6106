//! The landmarked-space embedding and the linear decision rule over it.
//!
//! With landmark pairs `(x⁺ⱼ, x⁻ⱼ)`, point `x` maps to the row
//! `f(K(x, x⁺ⱼ) − K(x, x⁻ⱼ))` for `j = 1..d`. The singleton variant uses raw
//! similarities `K(x, lⱼ)` to single landmarks instead.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{write_csv_rows, BinaryLabels, Kernel};
use crate::error::{Error, Result};
use crate::landmark::{LandmarkPairSet, LandmarkSet};
use crate::matrix::Matrix;
use crate::trainer::LinearModel;
use crate::transfer::TransferFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LandmarkSource {
    Pairs(LandmarkPairSet),
    Singletons(LandmarkSet),
}

impl LandmarkSource {
    pub fn dim(&self) -> usize {
        match self {
            LandmarkSource::Pairs(p) => p.len(),
            LandmarkSource::Singletons(s) => s.len(),
        }
    }
}

/// Embedded points with their `±1` labels. Row `i` is `point_ids[i]`.
#[derive(Debug, Clone)]
pub struct EmbeddedDataset {
    matrix: Matrix,
    labels: Vec<i8>,
    point_ids: Vec<usize>,
    source: LandmarkSource,
    transfer: Option<TransferFunction>,
}

impl EmbeddedDataset {
    /// Wraps an already-embedded matrix (used by tests and tools that build
    /// coordinates directly).
    pub fn from_parts(matrix: Matrix, labels: Vec<i8>, source: LandmarkSource) -> Result<Self> {
        if labels.len() != matrix.rows() {
            return Err(Error::Shape {
                expected: matrix.rows(),
                got: labels.len(),
            });
        }
        if source.dim() != matrix.cols() {
            return Err(Error::Shape {
                expected: matrix.cols(),
                got: source.dim(),
            });
        }
        let point_ids = (0..matrix.rows()).collect();
        Ok(EmbeddedDataset {
            matrix,
            labels,
            point_ids,
            source,
            transfer: None,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn point_ids(&self) -> &[usize] {
        &self.point_ids
    }

    pub fn source(&self) -> &LandmarkSource {
        &self.source
    }

    pub fn transfer(&self) -> Option<TransferFunction> {
        self.transfer
    }

    /// Number of embedded points.
    pub fn len(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.rows() == 0
    }

    /// Embedding dimension `d`.
    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    /// Writes one CSV row per point, `d` columns, no header.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_csv_rows(path, self.matrix.iter_rows())
    }
}

fn check_ids(kernel: &Kernel<'_>, ids: impl IntoIterator<Item = usize>) -> Result<()> {
    let data = kernel.dataset();
    ids.into_iter().try_for_each(|i| data.check_index(i))
}

fn gather_labels(labels: &BinaryLabels, point_ids: &[usize]) -> Result<Vec<i8>> {
    point_ids
        .iter()
        .map(|&i| {
            if i < labels.len() {
                Ok(labels.get(i))
            } else {
                Err(Error::Index {
                    index: i,
                    len: labels.len(),
                })
            }
        })
        .collect()
}

/// Pair embedding: entry `(i, j) = f(K(xᵢ, x⁺ⱼ) − K(xᵢ, x⁻ⱼ))`.
pub fn embed_pairs(
    kernel: &Kernel<'_>,
    pairs: &LandmarkPairSet,
    f: TransferFunction,
    point_ids: &[usize],
    labels: &BinaryLabels,
) -> Result<EmbeddedDataset> {
    check_ids(kernel, pairs.pairs().iter().flat_map(|&(p, q)| [p, q]))?;
    check_ids(kernel, point_ids.iter().copied())?;
    let row_labels = gather_labels(labels, point_ids)?;
    let matrix = Matrix::from_fn(point_ids.len(), pairs.len(), |i, j| {
        let x = point_ids[i];
        let (p, q) = pairs.pairs()[j];
        f.apply(kernel.eval(x, p) - kernel.eval(x, q))
    });
    Ok(EmbeddedDataset {
        matrix,
        labels: row_labels,
        point_ids: point_ids.to_vec(),
        source: LandmarkSource::Pairs(pairs.clone()),
        transfer: Some(f),
    })
}

/// Singleton embedding: entry `(i, j) = K(xᵢ, lⱼ)`, no transfer applied.
pub fn embed_singletons(
    kernel: &Kernel<'_>,
    landmarks: &LandmarkSet,
    point_ids: &[usize],
    labels: &BinaryLabels,
) -> Result<EmbeddedDataset> {
    check_ids(kernel, landmarks.ids().iter().copied())?;
    check_ids(kernel, point_ids.iter().copied())?;
    let row_labels = gather_labels(labels, point_ids)?;
    let matrix = Matrix::from_fn(point_ids.len(), landmarks.len(), |i, j| {
        kernel.eval(point_ids[i], landmarks.ids()[j])
    });
    Ok(EmbeddedDataset {
        matrix,
        labels: row_labels,
        point_ids: point_ids.to_vec(),
        source: LandmarkSource::Singletons(landmarks.clone()),
        transfer: None,
    })
}

/// `(1/d)·⟨w, row⟩ + bias`.
pub fn decision_value(model: &LinearModel, embedded_row: &[f64]) -> Result<f64> {
    let d = model.weights.len();
    if embedded_row.len() != d {
        return Err(Error::Shape {
            expected: d,
            got: embedded_row.len(),
        });
    }
    Ok(model.decision_unchecked(embedded_row))
}

/// Sign of the decision value; an exact zero is classified `+1`.
pub fn classify(model: &LinearModel, embedded_row: &[f64]) -> Result<i8> {
    decision_value(model, embedded_row).map(sign_label)
}

#[inline]
pub(crate) fn sign_label(value: f64) -> i8 {
    if value >= 0.0 {
        1
    } else {
        -1
    }
}

/// Fraction of `(value, label)` with `label · value < margin`.
pub fn margin_error(values: &[(f64, i8)], margin: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let errors = values
        .iter()
        .filter(|&&(v, y)| f64::from(y) * v < margin)
        .count();
    errors as f64 / values.len() as f64
}
