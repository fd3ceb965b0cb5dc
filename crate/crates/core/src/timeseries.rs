//! Univariate time series, labeled datasets and stratified sample pools.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered sequence of finite observations sampled at integer times `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "need at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value {} at index {i}",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false: a valid series holds at least two points.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn mean(&self) -> f64 {
        mean(&self.0)
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        population_std(&self.0)
    }
}

impl<'de> Deserialize<'de> for TimeSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(deserializer)?;
        TimeSeries::new(values).map_err(serde::de::Error::custom)
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub(crate) fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    var.sqrt()
}

/// Class identifier, contiguous from 0 within a dataset.
pub type ClassId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub series: TimeSeries,
    pub label: ClassId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}` (expected train or test)")),
        }
    }
}

/// A named dataset with its predefined train/test splits.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub train: Vec<LabeledInstance>,
    pub test: Vec<LabeledInstance>,
    pub series_length: usize,
    pub classes: BTreeSet<ClassId>,
    /// Original label token for each class id, for display.
    pub raw_labels: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        train: Vec<LabeledInstance>,
        test: Vec<LabeledInstance>,
        raw_labels: Vec<String>,
    ) -> Result<Self> {
        let name = name.into();
        let first = train
            .first()
            .or_else(|| test.first())
            .ok_or_else(|| Error::Config(format!("dataset `{name}` has no instances")))?;
        let series_length = first.series.len();
        if let Some(bad) = train
            .iter()
            .chain(&test)
            .find(|inst| inst.series.len() != series_length)
        {
            return Err(Error::Config(format!(
                "dataset `{name}` mixes series lengths {series_length} and {}",
                bad.series.len()
            )));
        }
        let classes: BTreeSet<ClassId> = train.iter().chain(&test).map(|i| i.label).collect();
        if let Some(&max) = classes.iter().next_back() {
            if max >= raw_labels.len() {
                return Err(Error::Config(format!(
                    "dataset `{name}` uses class {max} but only {} raw labels are known",
                    raw_labels.len()
                )));
            }
        }
        Ok(Self {
            name,
            train,
            test,
            series_length,
            classes,
            raw_labels,
        })
    }

    pub fn split(&self, split: Split) -> &[LabeledInstance] {
        match split {
            Split::Train => &self.train,
            Split::Test => &self.test,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn instances(&self) -> impl Iterator<Item = &LabeledInstance> {
        self.train.iter().chain(&self.test)
    }

    /// Applies per-instance z-normalization to every split.
    pub fn znormalized(&self) -> Dataset {
        let norm = |split: &[LabeledInstance]| {
            split
                .iter()
                .map(|inst| LabeledInstance {
                    series: znormalize(&inst.series),
                    label: inst.label,
                })
                .collect()
        };
        Dataset {
            name: self.name.clone(),
            train: norm(&self.train),
            test: norm(&self.test),
            series_length: self.series_length,
            classes: self.classes.clone(),
            raw_labels: self.raw_labels.clone(),
        }
    }
}

/// Rescales a series to zero mean and unit population standard deviation.
///
/// A constant series maps to all zeros.
pub fn znormalize(ts: &TimeSeries) -> TimeSeries {
    let m = ts.mean();
    let sd = ts.std();
    let values = if sd > 0.0 {
        ts.values().iter().map(|v| (v - m) / sd).collect()
    } else {
        vec![0.0; ts.len()]
    };
    TimeSeries(values)
}

/// An instance drawn into a sample pool, with its index in the source split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolMember {
    pub id: usize,
    pub instance: LabeledInstance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePool {
    pub members: Vec<PoolMember>,
    pub source_split: Split,
    pub seed: u64,
}

impl SamplePool {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn series_length(&self) -> Option<usize> {
        self.members.first().map(|m| m.instance.series.len())
    }
}

/// Per-class sample sizes: floor of the proportional share, with the leftover
/// handed out one at a time to the largest classes (ties to the lowest id).
pub(crate) fn class_quotas(
    counts: &BTreeMap<ClassId, usize>,
    size: usize,
) -> BTreeMap<ClassId, usize> {
    let total: usize = counts.values().sum();
    let mut quotas: BTreeMap<ClassId, usize> = counts
        .iter()
        .map(|(&c, &n)| (c, size * n / total))
        .collect();
    let mut remaining = size - quotas.values().sum::<usize>();
    let mut by_size: Vec<(ClassId, usize)> = counts.iter().map(|(&c, &n)| (c, n)).collect();
    by_size.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    while remaining > 0 {
        let before = remaining;
        for &(class, count) in &by_size {
            if remaining == 0 {
                break;
            }
            let q = quotas.get_mut(&class).expect("class present");
            if *q < count {
                *q += 1;
                remaining -= 1;
            }
        }
        if before == remaining {
            break;
        }
    }
    quotas
}

/// Draws up to `size` instances from `split`, preserving class proportions.
///
/// The draw is a pure function of `(split, size, seed)`; member order follows
/// the source split.
pub fn stratified_sample(
    split: &[LabeledInstance],
    source_split: Split,
    size: usize,
    seed: u64,
) -> SamplePool {
    let mut selected: Vec<usize> = if split.len() <= size {
        (0..split.len()).collect()
    } else {
        let mut by_class: BTreeMap<ClassId, Vec<usize>> = BTreeMap::new();
        for (i, inst) in split.iter().enumerate() {
            by_class.entry(inst.label).or_default().push(i);
        }
        let counts = by_class.iter().map(|(&c, ids)| (c, ids.len())).collect();
        let quotas = class_quotas(&counts, size);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen = Vec::with_capacity(size);
        for (class, mut ids) in by_class {
            ids.shuffle(&mut rng);
            chosen.extend_from_slice(&ids[..quotas[&class]]);
        }
        chosen
    };
    selected.sort_unstable();
    SamplePool {
        members: selected
            .into_iter()
            .map(|id| PoolMember {
                id,
                instance: split[id].clone(),
            })
            .collect(),
        source_split,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn split_with(counts: &[(ClassId, usize)]) -> Vec<LabeledInstance> {
        let mut out = Vec::new();
        for &(label, n) in counts {
            for i in 0..n {
                out.push(LabeledInstance {
                    series: ts(&[i as f64, label as f64]),
                    label,
                });
            }
        }
        out
    }

    #[test]
    fn rejects_short_and_nonfinite() {
        assert!(TimeSeries::new(vec![1.0]).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn znormalize_small_example() {
        let z = znormalize(&ts(&[1.0, 2.0, 3.0]));
        let expected = 1.5f64.sqrt();
        assert!((z.values()[0] + expected).abs() < 1e-12);
        assert_eq!(z.values()[1], 0.0);
        assert!((z.values()[2] - expected).abs() < 1e-12);
        assert!(z.mean().abs() < 1e-12);
        assert!((z.std() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn znormalize_constant_is_zero() {
        assert_eq!(znormalize(&ts(&[5.0, 5.0, 5.0])).values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn znormalize_is_idempotent() {
        let once = znormalize(&ts(&[0.3, -1.2, 4.4, 2.0, 0.1]));
        let twice = znormalize(&once);
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_balanced_split() {
        let split = split_with(&[(0, 100), (1, 100)]);
        let pool = stratified_sample(&split, Split::Test, 100, 1);
        assert_eq!(pool.len(), 100);
        let ones = pool
            .members
            .iter()
            .filter(|m| m.instance.label == 1)
            .count();
        assert_eq!(ones, 50);
    }

    #[test]
    fn sample_small_split_returns_everything() {
        let split = split_with(&[(0, 20), (1, 10)]);
        let pool = stratified_sample(&split, Split::Test, 100, 1);
        assert_eq!(pool.len(), 30);
        assert!(pool.members.iter().enumerate().all(|(i, m)| m.id == i));
    }

    #[test]
    fn sample_70_30_is_reproducible() {
        let split = split_with(&[(0, 700), (1, 300)]);
        let a = stratified_sample(&split, Split::Test, 100, 7);
        let b = stratified_sample(&split, Split::Test, 100, 7);
        assert_eq!(a, b);
        let zeros = a.members.iter().filter(|m| m.instance.label == 0).count();
        assert_eq!(zeros, 70);
        assert_eq!(a.len() - zeros, 30);
        let c = stratified_sample(&split, Split::Test, 100, 8);
        assert_ne!(
            a.members.iter().map(|m| m.id).collect::<Vec<_>>(),
            c.members.iter().map(|m| m.id).collect::<Vec<_>>()
        );
    }

    #[test]
    fn remainder_goes_to_largest_classes() {
        let counts = BTreeMap::from([(0, 10), (1, 10), (2, 10)]);
        let q = class_quotas(&counts, 10);
        assert_eq!(q.values().sum::<usize>(), 10);
        assert_eq!(q[&0], 4);
        assert_eq!(q[&1], 3);
        let counts = BTreeMap::from([(0, 5), (1, 50)]);
        let q = class_quotas(&counts, 8);
        assert_eq!((q[&0], q[&1]), (0, 8));
    }

    #[test]
    fn dataset_rejects_ragged_lengths() {
        let a = LabeledInstance {
            series: ts(&[1.0, 2.0]),
            label: 0,
        };
        let b = LabeledInstance {
            series: ts(&[1.0, 2.0, 3.0]),
            label: 0,
        };
        assert!(Dataset::new("x", vec![a], vec![b], vec!["1".into()]).is_err());
    }
}
