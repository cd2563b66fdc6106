//! Landmark selection.
//!
//! Landmark pairs `(x⁺, x⁻)` index the coordinates of the landmarked space.
//! They are either sampled uniformly ([`random_pairs`]) or drawn from a
//! diverse pool built greedily by [`dselect`]: starting from a random point,
//! repeatedly add the remaining training point with the smallest total
//! similarity to the points already chosen.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::data::{BinaryLabels, Dataset, Kernel};
use crate::error::{Error, Result};
use crate::seed;

/// Ordered `(positive, negative)` landmark pairs. Duplicates are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LandmarkPairSet {
    pairs: Vec<(usize, usize)>,
}

impl LandmarkPairSet {
    /// Checks that every pair is `(+1, -1)` under `labels`.
    pub fn new(pairs: Vec<(usize, usize)>, labels: &BinaryLabels) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Argument("landmark pair set is empty".into()));
        }
        for &(p, q) in &pairs {
            for i in [p, q] {
                if i >= labels.len() {
                    return Err(Error::Index {
                        index: i,
                        len: labels.len(),
                    });
                }
            }
            if labels.get(p) != 1 || labels.get(q) != -1 {
                return Err(Error::Argument(format!(
                    "pair ({p}, {q}) is not (positive, negative)"
                )));
            }
        }
        Ok(LandmarkPairSet { pairs })
    }

    #[cfg(test)]
    pub(crate) fn new_unchecked(pairs: Vec<(usize, usize)>) -> Self {
        LandmarkPairSet { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Distinct landmark point ids, in selection order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LandmarkSet {
    ids: Vec<usize>,
}

impl LandmarkSet {
    pub fn new(ids: Vec<usize>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::Argument("landmark set is empty".into()));
        }
        for (k, id) in ids.iter().enumerate() {
            if ids[..k].contains(id) {
                return Err(Error::Argument(format!("duplicate landmark {id}")));
            }
        }
        Ok(LandmarkSet { ids })
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Whether the kernel values are similarities (greedy minimizes the total)
/// or distances (greedy maximizes it).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    #[default]
    Similarity,
    Distance,
}

fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::Argument(
            "number of landmarks must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

/// `d` pairs, each an independent uniform draw (with replacement) of one
/// positive and one negative training point.
pub fn random_pairs(
    labels: &BinaryLabels,
    train: &[usize],
    d: usize,
    seed: u64,
) -> Result<LandmarkPairSet> {
    check_d(d)?;
    let pos = labels.select(train, 1);
    let neg = labels.select(train, -1);
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::ClassCoverage(format!(
            "training ids hold {} positives and {} negatives",
            pos.len(),
            neg.len()
        )));
    }
    let mut rng = seed::rng(seed);
    let pairs = (0..d)
        .map(|_| {
            (
                pos[rng.gen_range(0..pos.len())],
                neg[rng.gen_range(0..neg.len())],
            )
        })
        .collect();
    Ok(LandmarkPairSet { pairs })
}

/// `d` distinct training points drawn uniformly without replacement.
pub fn random_landmarks(train: &[usize], d: usize, seed: u64) -> Result<LandmarkSet> {
    check_d(d)?;
    if d > train.len() {
        return Err(Error::Size(format!(
            "cannot pick {d} landmarks from {} points",
            train.len()
        )));
    }
    let mut rng = seed::rng(seed);
    let ids = train.choose_multiple(&mut rng, d).copied().collect();
    Ok(LandmarkSet { ids })
}

/// Greedy diversity selection seeded with `first`.
///
/// Each step adds the remaining point minimizing (or, in distance mode,
/// maximizing) the summed kernel value to the current selection; ties go to
/// the smallest point id.
pub fn greedy_from(
    kernel: &Kernel<'_>,
    train: &[usize],
    d: usize,
    first: usize,
    mode: SelectionMode,
) -> Result<LandmarkSet> {
    check_d(d)?;
    if d > train.len() {
        return Err(Error::Size(format!(
            "cannot pick {d} landmarks from {} points",
            train.len()
        )));
    }
    if !train.contains(&first) {
        return Err(Error::Argument(format!(
            "seed point {first} is not a training id"
        )));
    }
    for &i in train {
        kernel.dataset().check_index(i)?;
    }

    let mut remaining: Vec<usize> = train.iter().copied().filter(|&i| i != first).collect();
    let mut totals: Vec<f64> = remaining.iter().map(|&x| kernel.eval(x, first)).collect();
    let mut chosen = Vec::with_capacity(d);
    chosen.push(first);

    while chosen.len() < d {
        let mut best = 0;
        for k in 1..remaining.len() {
            let (v, id) = (totals[k], remaining[k]);
            let (bv, bid) = (totals[best], remaining[best]);
            let better = match mode {
                SelectionMode::Similarity => v < bv,
                SelectionMode::Distance => v > bv,
            };
            if better || (v == bv && id < bid) {
                best = k;
            }
        }
        let z = remaining.swap_remove(best);
        totals.swap_remove(best);
        chosen.push(z);
        for (t, &x) in totals.iter_mut().zip(&remaining) {
            *t += kernel.eval(x, z);
        }
    }
    Ok(LandmarkSet { ids: chosen })
}

/// Diversity-selected landmark set with a uniformly random first point.
pub fn dselect_landmarks(
    kernel: &Kernel<'_>,
    train: &[usize],
    d: usize,
    seed: u64,
    mode: SelectionMode,
) -> Result<LandmarkSet> {
    check_d(d)?;
    if train.is_empty() {
        return Err(Error::Size("no training points".into()));
    }
    let mut rng = seed::rng(seed);
    let first = train[rng.gen_range(0..train.len())];
    greedy_from(kernel, train, d, first, mode)
}

/// `d` pairs sampled with replacement from `pool`, each pairing a positive
/// pool member with a negative one.
pub fn pairs_from_pool(
    pool: &[usize],
    labels: &BinaryLabels,
    d: usize,
    seed: u64,
) -> Result<LandmarkPairSet> {
    check_d(d)?;
    let pos = labels.select(pool, 1);
    let neg = labels.select(pool, -1);
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::DiversityDegenerate(format!(
            "{} positives and {} negatives among {} landmarks",
            pos.len(),
            neg.len(),
            pool.len()
        )));
    }
    let mut rng = seed::rng(seed);
    let pairs = (0..d)
        .map(|_| {
            (
                pos[rng.gen_range(0..pos.len())],
                neg[rng.gen_range(0..neg.len())],
            )
        })
        .collect();
    Ok(LandmarkPairSet { pairs })
}

/// Diversity selection followed by pair sampling from the selected points.
///
/// Fails with [`Error::DiversityDegenerate`] when the selected points are all
/// of one label; callers may fall back to [`random_pairs`].
pub fn dselect(
    kernel: &Kernel<'_>,
    train: &[usize],
    labels: &BinaryLabels,
    d: usize,
    seed: u64,
    mode: SelectionMode,
) -> Result<(LandmarkSet, LandmarkPairSet)> {
    let landmarks = dselect_landmarks(kernel, train, d, seed, mode)?;
    let pairs = pairs_from_pool(
        landmarks.ids(),
        labels,
        d,
        seed::derive_named(seed, "pairs"),
    )?;
    Ok((landmarks, pairs))
}

/// Per-class quotas summing to exactly `d`.
///
/// Each class starts at `⌈d / k⌉`, capped by its size. Any shortfall is
/// handed out one point at a time to classes with spare points (lowest class
/// id first); any excess is removed one point at a time from the class
/// holding the most, highest class id on ties.
pub fn class_quotas(class_sizes: &[usize], d: usize) -> Result<Vec<usize>> {
    let k = class_sizes.len();
    if k == 0 || d < k {
        return Err(Error::Argument(format!(
            "need at least one landmark per class: d = {d}, classes = {k}"
        )));
    }
    let total: usize = class_sizes.iter().sum();
    if total < d {
        return Err(Error::Size(format!(
            "only {total} training points for {d} landmarks"
        )));
    }
    let base = d.div_ceil(k);
    let mut quotas: Vec<usize> = class_sizes.iter().map(|&s| s.min(base)).collect();
    let mut assigned: usize = quotas.iter().sum();
    while assigned < d {
        let c = (0..k)
            .find(|&c| quotas[c] < class_sizes[c])
            .expect("total >= d guarantees spare capacity");
        quotas[c] += 1;
        assigned += 1;
    }
    while assigned > d {
        // max_by_key keeps the last maximum, i.e. the highest class id
        let c = (0..k)
            .max_by_key(|&c| quotas[c])
            .expect("at least one class");
        quotas[c] -= 1;
        assigned -= 1;
    }
    Ok(quotas)
}

/// Runs diversity selection independently inside each class with the quotas
/// of [`class_quotas`]; the result concatenates classes in id order.
pub fn dselect_multiclass(
    kernel: &Kernel<'_>,
    dataset: &Dataset,
    train: &[usize],
    d: usize,
    seed: u64,
    mode: SelectionMode,
) -> Result<LandmarkSet> {
    let k = dataset.num_classes();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &i in train {
        dataset.check_index(i)?;
        members[dataset.class_of(i)].push(i);
    }
    let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let quotas = class_quotas(&sizes, d)?;
    let mut ids = Vec::with_capacity(d);
    for (c, (ids_c, &q)) in members.iter().zip(&quotas).enumerate() {
        if q == 0 {
            continue;
        }
        let picked = dselect_landmarks(kernel, ids_c, q, seed::derive(seed, c as u64), mode)?;
        ids.extend_from_slice(picked.ids());
    }
    Ok(LandmarkSet { ids })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::KernelSpec;
    use crate::matrix::Matrix;

    fn four_point() -> Dataset {
        let m = Matrix::from_rows(&[
            vec![1.0, 0.9, 0.1, 0.2],
            vec![0.9, 1.0, 0.15, 0.25],
            vec![0.1, 0.15, 1.0, 0.8],
            vec![0.2, 0.25, 0.8, 1.0],
        ]);
        Dataset::from_similarity(m, &[1, 0, 1, 0]).unwrap()
    }

    #[test]
    fn hand_derived_greedy_example() {
        let ds = four_point();
        let k = Kernel::new(&KernelSpec::precomputed(), &ds).unwrap();
        let sel = greedy_from(&k, &[0, 1, 2, 3], 3, 0, SelectionMode::Similarity).unwrap();
        assert_eq!(sel.ids(), &[0, 2, 3]);
    }

    #[test]
    fn single_landmark_is_the_seed() {
        let ds = four_point();
        let k = Kernel::new(&KernelSpec::precomputed(), &ds).unwrap();
        let sel = greedy_from(&k, &[0, 1, 2, 3], 1, 2, SelectionMode::Similarity).unwrap();
        assert_eq!(sel.ids(), &[2]);
    }

    #[test]
    fn equal_similarities_break_ties_by_id() {
        let m = Matrix::from_fn(6, 6, |i, j| if i == j { 1.0 } else { 0.3 });
        let ds = Dataset::from_similarity(m, &[0, 1, 0, 1, 0, 1]).unwrap();
        let k = Kernel::new(&KernelSpec::precomputed(), &ds).unwrap();
        let sel = greedy_from(&k, &[5, 3, 0, 1, 4, 2], 6, 3, SelectionMode::Similarity).unwrap();
        assert_eq!(sel.ids(), &[3, 0, 1, 2, 4, 5]);
    }

    #[test]
    fn distance_mode_maximizes() {
        // Points on a line; distances |i - j|. Starting at 0, the farthest is 4.
        let m = Matrix::from_fn(5, 5, |i, j| (i as f64 - j as f64).abs());
        let ds = Dataset::from_similarity(m, &[0, 1, 0, 1, 0]).unwrap();
        let k = Kernel::new(&KernelSpec::precomputed(), &ds).unwrap();
        let sel = greedy_from(&k, &[0, 1, 2, 3, 4], 3, 0, SelectionMode::Distance).unwrap();
        // step 3: sums to {0,4} are 4 for 1,2,3 -> smallest id wins
        assert_eq!(sel.ids(), &[0, 4, 1]);
    }

    #[test]
    fn random_pairs_single_choice() {
        let labels = BinaryLabels(vec![1, -1, 1]);
        let pairs = random_pairs(&labels, &[0, 1], 3, 9).unwrap();
        assert_eq!(pairs.pairs(), &[(0, 1), (0, 1), (0, 1)]);
        assert!(matches!(
            random_pairs(&labels, &[0, 1], 0, 9),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            random_pairs(&labels, &[0, 2], 3, 9),
            Err(Error::ClassCoverage(_))
        ));
    }

    #[test]
    fn random_pairs_deterministic() {
        let labels = BinaryLabels((0..20).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect());
        let ids: Vec<usize> = (0..20).collect();
        let a = random_pairs(&labels, &ids, 15, 4).unwrap();
        assert_eq!(a, random_pairs(&labels, &ids, 15, 4).unwrap());
        assert_ne!(a, random_pairs(&labels, &ids, 15, 5).unwrap());
        for &(p, q) in a.pairs() {
            assert_eq!((labels.get(p), labels.get(q)), (1, -1));
        }
    }

    #[test]
    fn dselect_pairs_have_opposite_labels() {
        let ds = four_point();
        let labels = ds.binary_labels().unwrap();
        let k = Kernel::new(&KernelSpec::precomputed(), &ds).unwrap();
        for s in 0..10 {
            let (set, pairs) =
                dselect(&k, &[0, 1, 2, 3], &labels, 3, s, SelectionMode::Similarity).unwrap();
            assert_eq!(set.len(), 3);
            assert_eq!(pairs.len(), 3);
            for &(p, q) in pairs.pairs() {
                assert!(set.ids().contains(&p) && set.ids().contains(&q));
                assert_eq!((labels.get(p), labels.get(q)), (1, -1));
            }
        }
    }

    #[test]
    fn single_class_pool_is_degenerate() {
        let labels = BinaryLabels(vec![1, 1, -1]);
        assert!(matches!(
            pairs_from_pool(&[0, 1], &labels, 2, 0),
            Err(Error::DiversityDegenerate(_))
        ));
    }

    #[test]
    fn quota_arithmetic() {
        assert_eq!(class_quotas(&[50, 50], 10).unwrap(), vec![5, 5]);
        assert_eq!(class_quotas(&[50, 50, 50], 10).unwrap(), vec![4, 3, 3]);
        assert_eq!(class_quotas(&[2, 50, 50], 10).unwrap(), vec![2, 4, 4]);
        assert_eq!(class_quotas(&[1, 1, 50], 6).unwrap(), vec![1, 1, 4]);
        assert!(matches!(
            class_quotas(&[5, 5, 5], 2),
            Err(Error::Argument(_))
        ));
        assert!(matches!(class_quotas(&[1, 1, 1], 4), Err(Error::Size(_))));
    }

    #[test]
    fn multiclass_selection_respects_quotas() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64, (i % 7) as f64]).collect();
        let labels: Vec<i64> = (0..30).map(|i| i % 3).collect();
        let ds = Dataset::from_features(rows, &labels).unwrap();
        let k = Kernel::new(&KernelSpec::gaussian(None), &ds).unwrap();
        let train: Vec<usize> = (0..30).collect();
        let set = dselect_multiclass(&k, &ds, &train, 10, 1, SelectionMode::Similarity).unwrap();
        assert_eq!(set.len(), 10);
        assert_eq!(ds.class_counts(set.ids()), vec![4, 3, 3]);
        assert!(dselect_multiclass(&k, &ds, &train, 2, 1, SelectionMode::Similarity).is_err());
    }
}
