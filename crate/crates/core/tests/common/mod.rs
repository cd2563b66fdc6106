//! Brute-force reference implementations shared by the integration tests.
//! They work on raw matrices and never call into the library's estimators
//! or solvers.

#![allow(dead_code)]

use rand::Rng;
use simland::seed;
use simland::{Dataset, Matrix, TransferFunction};

/// A random binary instance with a raw similarity matrix.
pub struct Instance {
    pub n: usize,
    pub raw: Matrix,
    pub labels: Vec<i8>,
    pub dataset: Dataset,
}

pub fn random_instance(rng: &mut seed::Rng, n_min: usize, n_max: usize) -> Instance {
    let n = rng.gen_range(n_min..=n_max);
    let mut labels: Vec<i8> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
        .collect();
    labels[0] = 1;
    labels[1] = -1;
    let raw = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let raw_labels: Vec<i64> = labels.iter().map(|&y| i64::from(y > 0)).collect();
    let dataset = Dataset::from_similarity(raw.clone(), &raw_labels).unwrap();
    Instance {
        n,
        raw,
        labels,
        dataset,
    }
}

pub fn random_transfer(rng: &mut seed::Rng) -> TransferFunction {
    match rng.gen_range(0..4) {
        0 => TransferFunction::Sign,
        1 => TransferFunction::Identity,
        _ => TransferFunction::ramp(10f64.powf(rng.gen_range(-0.5..3.5))).unwrap(),
    }
}

/// Kernel values the way a precomputed kernel normalizes them: divided by
/// the largest absolute entry.
pub fn normalized(raw: &Matrix) -> Matrix {
    let n = raw.rows();
    let mut scale = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(raw[(i, j)].abs());
        }
    }
    if scale == 0.0 {
        scale = 1.0;
    }
    Matrix::from_fn(n, raw.cols(), |i, j| raw[(i, j)] / scale)
}

/// Per-point pair goodness by explicit double loop.
pub fn brute_pair_values(
    k: &Matrix,
    labels: &[i8],
    f: &TransferFunction,
    w: impl Fn(usize, usize) -> f64,
) -> Vec<f64> {
    let n = labels.len();
    (0..n)
        .map(|x| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for a in 0..n {
                if labels[a] != labels[x] {
                    continue;
                }
                for b in 0..n {
                    if labels[b] == labels[x] {
                        continue;
                    }
                    sum += w(a, b) * f.apply(k[(x, a)] - k[(x, b)]);
                    count += 1;
                }
            }
            sum / count as f64
        })
        .collect()
}

pub fn brute_c_f(k: &Matrix, f: &TransferFunction) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k.rows() {
        for j in 0..k.cols() {
            let v = f.apply(k[(i, j)]);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    hi - lo
}

pub fn brute_bbs_gaps(k: &Matrix, labels: &[i8], u: &[f64]) -> Vec<f64> {
    let n = labels.len();
    (0..n)
        .map(|x| {
            let (mut s_same, mut c_same, mut s_other, mut c_other) = (0.0, 0usize, 0.0, 0usize);
            for a in 0..n {
                if labels[a] == labels[x] {
                    s_same += u[a] * k[(x, a)];
                    c_same += 1;
                } else {
                    s_other += u[a] * k[(x, a)];
                    c_other += 1;
                }
            }
            s_same / c_same as f64 - s_other / c_other as f64
        })
        .collect()
}

pub fn brute_sign_values(dist: &Matrix, labels: &[i8], u: &[f64]) -> Vec<f64> {
    let n = labels.len();
    (0..n)
        .map(|x| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for a in 0..n {
                if labels[a] != labels[x] {
                    continue;
                }
                for b in 0..n {
                    if labels[b] == labels[x] {
                        continue;
                    }
                    let diff = dist[(x, b)] - dist[(x, a)];
                    let s = if diff > 0.0 {
                        1.0
                    } else if diff < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                    sum += u[a] * u[b] * s;
                    count += 1;
                }
            }
            sum / count as f64
        })
        .collect()
}

/// `½‖v‖² + C·Σ max(0, 1 − yᵢ⟨v, zᵢ⟩)`.
pub fn hinge_objective(rows: &[Vec<f64>], labels: &[i8], c: f64, v: &[f64]) -> f64 {
    let reg: f64 = v.iter().map(|x| x * x).sum::<f64>() * 0.5;
    let loss: f64 = rows
        .iter()
        .zip(labels)
        .map(|(z, &y)| {
            let m: f64 = z.iter().zip(v).map(|(a, b)| a * b).sum();
            (1.0 - f64::from(y) * m).max(0.0)
        })
        .sum();
    reg + c * loss
}

/// `½‖v‖² + C·Σ log(1 + exp(−yᵢ⟨v, zᵢ⟩))`, computed naively.
pub fn logistic_objective(rows: &[Vec<f64>], labels: &[i8], c: f64, v: &[f64]) -> f64 {
    let reg: f64 = v.iter().map(|x| x * x).sum::<f64>() * 0.5;
    let loss: f64 = rows
        .iter()
        .zip(labels)
        .map(|(z, &y)| {
            let m: f64 = z.iter().zip(v).map(|(a, b)| a * b).sum();
            (1.0 + (-f64::from(y) * m).exp()).ln()
        })
        .sum();
    reg + c * loss
}
