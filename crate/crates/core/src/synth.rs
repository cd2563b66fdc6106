//! Synthetic datasets with known structure.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::data::Dataset;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::seed;

/// Radius of the ring the mode centers sit on.
pub const RING_RADIUS: f64 = 4.0;
/// Per-coordinate standard deviation inside a mode.
pub const MODE_SPREAD: f64 = 0.3;
/// Size ratio between consecutive modes of a class.
pub const MODE_DECAY: f64 = 4.0;

/// Points of two classes drawn from `modes_per_class` Gaussian modes each.
///
/// The `2·modes_per_class` centers are evenly spaced on a ring with classes
/// alternating around it. Within a class each mode is [`MODE_DECAY`] times
/// smaller than the previous one, so the rare modes are easy to miss when
/// sampling landmarks uniformly. Labels are `1` and `0`.
pub fn multimodal_clusters(n: usize, modes_per_class: usize, seed_value: u64) -> Result<Dataset> {
    let modes_per_class = modes_per_class.max(1);
    let total_modes = 2 * modes_per_class;
    let per_class = [n - n / 2, n / 2];
    let mut rng = seed::rng(seed_value);
    let noise = Normal::new(0.0, MODE_SPREAD).expect("positive spread");
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (class, &count) in per_class.iter().enumerate() {
        for (m, size) in mode_sizes(count, modes_per_class).into_iter().enumerate() {
            let slot = 2 * m + class;
            let angle = TAU * slot as f64 / total_modes as f64;
            let (cx, cy) = (RING_RADIUS * angle.cos(), RING_RADIUS * angle.sin());
            for _ in 0..size {
                rows.push(vec![
                    cx + noise.sample(&mut rng),
                    cy + noise.sample(&mut rng),
                ]);
                labels.push(1 - class as i64);
            }
        }
    }
    Dataset::from_features(rows, &labels)
}

/// Splits `count` into `k` sizes proportional to `MODE_DECAY^(k−1), …, 1`,
/// each at least one when `count ≥ k`.
fn mode_sizes(count: usize, k: usize) -> Vec<usize> {
    let weights: Vec<f64> = (0..k)
        .map(|i| MODE_DECAY.powi((k - 1 - i) as i32))
        .collect();
    let total_weight: f64 = weights.iter().sum();
    let mut sizes: Vec<usize> = weights
        .iter()
        .map(|w| ((count as f64 * w / total_weight).floor() as usize).max(usize::from(count >= k)))
        .collect();
    let assigned: usize = sizes.iter().sum();
    if assigned < count {
        sizes[0] += count - assigned;
    } else {
        sizes[0] -= assigned - count;
    }
    sizes
}

/// Symmetric similarity with unit diagonal, cross-class entries zero and
/// same-class entries drawn by `same`. Labels alternate `1, 0, 1, …`.
fn two_class_similarity(
    n: usize,
    seed_value: u64,
    mut same: impl FnMut(&mut seed::Rng) -> f64,
) -> Result<Dataset> {
    let labels: Vec<i64> = (0..n).map(|i| i64::from(i % 2 == 0)).collect();
    let mut rng = seed::rng(seed_value);
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = 1.0;
        for j in (i + 1)..n {
            if labels[i] == labels[j] {
                let v = same(&mut rng);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
    }
    Dataset::from_similarity(m, &labels)
}

/// Same-class similarities whose sign is informative (positive with
/// probability 3/4) and whose magnitude is log-uniform over
/// `[10^-3.5, 1]`. Only steep transfers recover the label signal cleanly.
pub fn sign_favoring(n: usize, seed_value: u64) -> Result<Dataset> {
    two_class_similarity(n, seed_value, |rng| {
        let magnitude = 10f64.powf(rng.gen_range(-3.5..0.0));
        if rng.gen_bool(0.75) {
            magnitude
        } else {
            -magnitude
        }
    })
}

/// Same-class similarities `+0.08` or `−0.02` with equal probability: the
/// sign carries no label information, the mean does.
pub fn linear_margin(n: usize, seed_value: u64) -> Result<Dataset> {
    two_class_similarity(
        n,
        seed_value,
        |rng| if rng.gen_bool(0.5) { 0.08 } else { -0.02 },
    )
}

/// Three classes (`i mod 3`) whose within-class similarities follow
/// [`sign_favoring`] for class 0 and [`linear_margin`] for classes 1 and 2,
/// so the best transfer differs between the one-vs-all problems.
pub fn mixed_multiclass(n: usize, seed_value: u64) -> Result<Dataset> {
    let labels: Vec<i64> = (0..n).map(|i| (i % 3) as i64).collect();
    let mut rng = seed::rng(seed_value);
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = 1.0;
        for j in (i + 1)..n {
            if labels[i] != labels[j] {
                continue;
            }
            let v = if labels[i] == 0 {
                let magnitude = 10f64.powf(rng.gen_range(-3.5..0.0));
                if rng.gen_bool(0.75) {
                    magnitude
                } else {
                    -magnitude
                }
            } else if rng.gen_bool(0.5) {
                0.08
            } else {
                -0.02
            };
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Dataset::from_similarity(m, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_sizes_sum_and_decay() {
        let s = mode_sizes(400, 4);
        assert_eq!(s, vec![303, 75, 18, 4]);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(mode_sizes(3, 4).iter().sum::<usize>(), 3);
    }

    #[test]
    fn multimodal_shape() {
        let ds = multimodal_clusters(800, 4, 1).unwrap();
        assert_eq!(ds.len(), 800);
        assert!(ds.is_binary());
        let all: Vec<usize> = (0..800).collect();
        assert_eq!(ds.class_counts(&all), vec![400, 400]);
    }

    #[test]
    fn similarity_generators_are_symmetric() {
        for ds in [
            sign_favoring(30, 2).unwrap(),
            linear_margin(30, 2).unwrap(),
            mixed_multiclass(30, 2).unwrap(),
        ] {
            let m = ds.similarity().unwrap();
            for i in 0..30 {
                assert_eq!(m[(i, i)], 1.0);
                for j in 0..30 {
                    assert_eq!(m[(i, j)], m[(j, i)]);
                    if ds.class_of(i) != ds.class_of(j) {
                        assert_eq!(m[(i, j)], 0.0);
                    }
                }
            }
        }
        assert_eq!(mixed_multiclass(30, 0).unwrap().num_classes(), 3);
    }
}
