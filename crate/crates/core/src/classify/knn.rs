use serde::{Deserialize, Serialize};

use super::{
    check_length, dtw_distance, dtw_squared_within, euclidean_distance, Classifier, SeriesKey,
};
use crate::error::{Error, Result};
use crate::timeseries::{ClassId, LabeledInstance, TimeSeries};

/// Added to neighbour distances before inverting them into vote weights.
pub const KNN_WEIGHT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Dtw,
    Euclidean,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Dtw => dtw_distance(a, b),
            Metric::Euclidean => euclidean_distance(a, b),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dtw" => Ok(Metric::Dtw),
            "euclidean" | "ed" => Ok(Metric::Euclidean),
            other => Err(Error::Config(format!(
                "unknown metric `{other}` (expected dtw or euclidean)"
            ))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::Dtw => "dtw",
            Metric::Euclidean => "euclidean",
        })
    }
}

/// Distance-weighted vote over `(distance, class)` neighbours.
///
/// Weights are `1 / (d + KNN_WEIGHT_EPSILON)`. If any neighbour is an exact
/// match, only the exact matches vote, one vote each. Ties go to the lowest
/// class id.
pub fn knn_vote(neighbours: &[(f64, ClassId)], n_classes: usize) -> ClassId {
    let mut votes = vec![0.0; n_classes];
    if neighbours.iter().any(|&(d, _)| d == 0.0) {
        for &(_, c) in neighbours.iter().filter(|&&(d, _)| d == 0.0) {
            votes[c] += 1.0;
        }
    } else {
        for &(d, c) in neighbours {
            votes[c] += 1.0 / (d + KNN_WEIGHT_EPSILON);
        }
    }
    let mut best = 0;
    for (c, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = c;
        }
    }
    best
}

/// Lazy nearest-neighbour classifier over the stored training set.
#[derive(Debug, Clone)]
pub struct KnnClassifier {
    name: String,
    k: usize,
    metric: Metric,
    train: Vec<LabeledInstance>,
    n_classes: usize,
    length: usize,
}

impl KnnClassifier {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// The `k` nearest training instances as `(distance, class)`, nearest
    /// first; equal distances keep training order.
    pub fn neighbours(&self, series: &TimeSeries) -> Vec<(f64, ClassId)> {
        let query = series.values();
        let mut by_euclid: Vec<(f64, usize)> = self
            .train
            .iter()
            .enumerate()
            .map(|(i, inst)| (squared_euclidean(query, inst.series.values()), i))
            .collect();
        by_euclid.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if self.metric == Metric::Euclidean {
            by_euclid.truncate(self.k);
            return by_euclid
                .into_iter()
                .map(|(d2, i)| (d2.sqrt(), self.train[i].label))
                .collect();
        }
        // DTW never exceeds the Euclidean distance, so the k-th smallest
        // Euclidean distance bounds the k-th smallest DTW distance. Visiting
        // candidates in Euclidean order tightens the bound early.
        let initial_cutoff = by_euclid[self.k - 1].0;
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(self.k + 1);
        for &(_, i) in &by_euclid {
            let cutoff = if best.len() == self.k {
                best[self.k - 1].0
            } else {
                initial_cutoff
            };
            let Some(d2) = dtw_squared_within(query, self.train[i].series.values(), cutoff) else {
                continue;
            };
            let entry = (d2, i);
            let before = |e: &(f64, usize)| e.0.total_cmp(&entry.0).then(e.1.cmp(&entry.1)).is_lt();
            if best.len() == self.k && before(&best[self.k - 1]) {
                continue;
            }
            let pos = best.partition_point(before);
            best.insert(pos, entry);
            best.truncate(self.k);
        }
        best.into_iter()
            .map(|(d2, i)| (d2.sqrt(), self.train[i].label))
            .collect()
    }
}

fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc + (x - y) * (x - y))
}

/// Stores `train` for `k`-nearest-neighbour prediction; `k` is capped at the
/// training-set size.
pub fn fit_knn(train: &[LabeledInstance], k: usize, metric: Metric) -> Result<KnnClassifier> {
    if train.is_empty() {
        return Err(Error::Config("kNN needs a nonempty training set".into()));
    }
    if k == 0 {
        return Err(Error::Config("kNN needs k >= 1".into()));
    }
    let n_classes = train.iter().map(|i| i.label).max().unwrap_or(0) + 1;
    let name = match metric {
        Metric::Dtw => format!("knn{k}-dtw"),
        Metric::Euclidean => format!("knn{k}-euclidean"),
    };
    Ok(KnnClassifier {
        name,
        k: k.min(train.len()),
        metric,
        length: train[0].series.len(),
        train: train.to_vec(),
        n_classes,
    })
}

impl Classifier for KnnClassifier {
    fn name(&self) -> &str {
        &self.name
    }

    fn predict(&self, series: &TimeSeries, _key: &SeriesKey<'_>) -> Result<ClassId> {
        check_length(self.length, series)?;
        Ok(knn_vote(&self.neighbours(series), self.n_classes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Variant;

    const KEY: SeriesKey<'static> = SeriesKey {
        dataset: "t",
        instance_id: 0,
        variant: Variant::Original,
    };

    fn inst(v: &[f64], label: ClassId) -> LabeledInstance {
        LabeledInstance {
            series: TimeSeries::new(v.to_vec()).unwrap(),
            label,
        }
    }

    #[test]
    fn exact_match_wins_with_k1() {
        let train = vec![inst(&[0.0, 1.0, 2.0], 0), inst(&[5.0, 1.0, 2.0], 1)];
        let clf = fit_knn(&train, 1, Metric::Dtw).unwrap();
        assert_eq!(clf.predict(&train[1].series, &KEY).unwrap(), 1);
    }

    #[test]
    fn near_neighbour_outweighs_two_far_ones() {
        // 1/(0.1+eps) ~ 10 against 1/5 + 1/6 ~ 0.367.
        assert_eq!(knn_vote(&[(0.1, 0), (5.0, 1), (6.0, 1)], 2), 0);
    }

    #[test]
    fn exact_matches_vote_alone() {
        assert_eq!(knn_vote(&[(0.0, 1), (1e-12, 0), (1e-12, 0)], 2), 1);
        assert_eq!(knn_vote(&[(0.0, 1), (0.0, 0)], 2), 0);
    }

    #[test]
    fn k_is_capped_at_training_size() {
        let train = vec![
            inst(&[0.0, 0.0], 0),
            inst(&[3.0, 3.0], 1),
            inst(&[3.1, 3.0], 1),
        ];
        let big = fit_knn(&train, 50, Metric::Euclidean).unwrap();
        let exact = fit_knn(&train, 3, Metric::Euclidean).unwrap();
        assert_eq!(big.k(), 3);
        let q = TimeSeries::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(
            big.predict(&q, &KEY).unwrap(),
            exact.predict(&q, &KEY).unwrap()
        );
    }

    #[test]
    fn one_nn_reproduces_training_labels() {
        let train = vec![
            inst(&[0.0, 0.1, 0.3], 0),
            inst(&[1.0, 0.1, 0.3], 1),
            inst(&[0.0, 2.1, 0.3], 2),
            inst(&[0.5, 0.5, 0.5], 1),
        ];
        let clf = fit_knn(&train, 1, Metric::Euclidean).unwrap();
        for t in &train {
            assert_eq!(clf.predict(&t.series, &KEY).unwrap(), t.label);
        }
    }

    #[test]
    fn pruned_search_matches_full_sort() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let series = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            (0..20).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        let train: Vec<_> = (0..40).map(|i| inst(&series(&mut rng), i % 3)).collect();
        for metric in [Metric::Dtw, Metric::Euclidean] {
            let clf = fit_knn(&train, 5, metric).unwrap();
            for _ in 0..20 {
                let q = series(&mut rng);
                let mut all: Vec<(f64, usize)> = train
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (metric.distance(&q, t.series.values()), i))
                    .collect();
                all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let got = clf.neighbours(&TimeSeries::new(q).unwrap());
                for (g, e) in got.iter().zip(&all[..5]) {
                    assert!((g.0 - e.0).abs() < 1e-12);
                    assert_eq!(g.1, train[e.1].label);
                }
            }
        }
    }

    #[test]
    fn rejects_wrong_length() {
        let clf = fit_knn(&[inst(&[0.0, 1.0], 0)], 1, Metric::Dtw).unwrap();
        let q = TimeSeries::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(
            clf.predict(&q, &KEY),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
