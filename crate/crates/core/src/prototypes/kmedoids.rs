use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::Metric;
use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

/// Symmetric pairwise distances, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn compute(items: &[TimeSeries], metric: Metric) -> Self {
        let n = items.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => {
                            metric.distance(items[i].values(), items[j].values())
                        }
                        _ => 0.0,
                    })
                    .collect()
            })
            .collect();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                data[i * n + j] = rows[i][j];
                data[j * n + i] = rows[i][j];
            }
        }
        DistanceMatrix { n, data }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = f(i, j);
            }
        }
        DistanceMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sum over all items of the distance to the nearest medoid.
    pub fn cost(&self, medoids: &[usize]) -> f64 {
        (0..self.n)
            .map(|i| {
                medoids
                    .iter()
                    .map(|&m| self.get(i, m))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMedoids {
    /// Indices into the input, ascending.
    pub medoids: Vec<usize>,
    pub cost: f64,
    /// Total cost after initialization and after every accepted improvement.
    pub cost_history: Vec<f64>,
}

/// Picks the best-scoring candidate; exact ties are broken by `rng`.
fn pick(
    candidates: impl Iterator<Item = (usize, f64)>,
    better: fn(f64, f64) -> bool,
    rng: &mut ChaCha8Rng,
) -> usize {
    let mut best: Vec<usize> = Vec::new();
    let mut best_score = f64::NAN;
    for (i, s) in candidates {
        if best.is_empty() || better(s, best_score) {
            best.clear();
            best.push(i);
            best_score = s;
        } else if s == best_score {
            best.push(i);
        }
    }
    *best.choose(rng).expect("at least one candidate")
}

/// PAM on a precomputed matrix: greedy build (total-distance minimizer, then
/// farthest points), then steepest-descent single swaps while the total cost
/// strictly drops. Small problems are then checked against every k-subset.
pub fn kmedoids_on_matrix(dist: &DistanceMatrix, k: usize, seed: u64) -> Result<KMedoids> {
    let n = dist.len();
    if k == 0 || k > n {
        return Err(Error::Config(format!(
            "k-medoids needs 1 <= k <= {n}, got k = {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let totals = (0..n).map(|i| (i, (0..n).map(|j| dist.get(i, j)).sum::<f64>()));
    let mut medoids = vec![pick(totals, |a, b| a < b, &mut rng)];
    while medoids.len() < k {
        let gaps = (0..n).filter(|i| !medoids.contains(i)).map(|i| {
            let nearest = medoids
                .iter()
                .map(|&m| dist.get(i, m))
                .fold(f64::INFINITY, f64::min);
            (i, nearest)
        });
        let next = pick(gaps, |a, b| a > b, &mut rng);
        medoids.push(next);
    }

    let mut cost = dist.cost(&medoids);
    let mut cost_history = vec![cost];
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for slot in 0..k {
            for candidate in (0..n).filter(|c| !medoids.contains(c)) {
                let mut trial = medoids.clone();
                trial[slot] = candidate;
                let c = dist.cost(&trial);
                if c < best.map_or(cost, |b| b.2) {
                    best = Some((slot, candidate, c));
                }
            }
        }
        let Some((slot, candidate, c)) = best else {
            break;
        };
        medoids[slot] = candidate;
        cost = c;
        cost_history.push(cost);
    }
    // Single swaps can stall in a local optimum. When the number of k-subsets
    // is small, finish with an exhaustive search.
    if let Some(best) = exhaustive_if_small(dist, k, cost) {
        medoids = best.0;
        cost = best.1;
        cost_history.push(cost);
    }
    medoids.sort_unstable();
    Ok(KMedoids {
        medoids,
        cost,
        cost_history,
    })
}

/// Subset count up to which [`kmedoids_on_matrix`] verifies optimality by
/// enumeration.
pub const EXHAUSTIVE_SUBSET_LIMIT: u64 = 20_000;

fn binomial(n: usize, k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k.min(n - k) as u64 {
        c = c.saturating_mul(n as u64 - i) / (i + 1);
    }
    c
}

/// The cheapest k-subset if enumeration is affordable and it beats `cost`.
fn exhaustive_if_small(dist: &DistanceMatrix, k: usize, cost: f64) -> Option<(Vec<usize>, f64)> {
    let n = dist.len();
    if binomial(n, k) > EXHAUSTIVE_SUBSET_LIMIT {
        return None;
    }
    let mut subset: Vec<usize> = (0..k).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let c = dist.cost(&subset);
        if c < best.as_ref().map_or(cost, |b| b.1) {
            best = Some((subset.clone(), c));
        }
        // Advance to the next combination in lexicographic order.
        let Some(i) = (0..k).rev().find(|&i| subset[i] < n - k + i) else {
            return best;
        };
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// k-medoids over `items`. Items are put in a canonical (value-sorted) order
/// first, so the result does not depend on the order they are given in.
pub fn kmedoids(items: &[TimeSeries], k: usize, metric: Metric, seed: u64) -> Result<KMedoids> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (items[a].values(), items[b].values());
        x.iter()
            .zip(y)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(x.len().cmp(&y.len()))
            .then(a.cmp(&b))
    });
    let canonical: Vec<TimeSeries> = order.iter().map(|&i| items[i].clone()).collect();
    let dist = DistanceMatrix::compute(&canonical, metric);
    let mut result = kmedoids_on_matrix(&dist, k, seed)?;
    for m in result.medoids.iter_mut() {
        *m = order[*m];
    }
    result.medoids.sort_unstable();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_equals_n_is_free() {
        let d = DistanceMatrix::from_fn(5, |i, j| (i as f64 - j as f64).abs());
        let r = kmedoids_on_matrix(&d, 5, 0).unwrap();
        assert_eq!(r.medoids, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 4), 70);
        assert_eq!(binomial(30, 1), 30);
        assert_eq!(binomial(5, 5), 1);
        assert!(binomial(100, 50) > EXHAUSTIVE_SUBSET_LIMIT);
    }

    #[test]
    fn bad_k() {
        let d = DistanceMatrix::from_fn(3, |_, _| 1.0);
        assert!(kmedoids_on_matrix(&d, 4, 0).is_err());
        assert!(kmedoids_on_matrix(&d, 0, 0).is_err());
    }

    #[test]
    fn line_median() {
        let pts = [0.0f64, 1.0, 2.0, 10.0, 11.0];
        let d = DistanceMatrix::from_fn(5, |i, j| (pts[i] - pts[j]).abs());
        assert_eq!(kmedoids_on_matrix(&d, 1, 0).unwrap().medoids, vec![2]);
        // Build picks 2 then 11; the one improving swap moves 2 to 1.
        assert_eq!(kmedoids_on_matrix(&d, 2, 0).unwrap().medoids, vec![1, 4]);
    }
}
