//! Exact penalized piecewise-linear simplification.
//!
//! Minimizes `sum_i (y_i - recon_i)^2 + alpha * segments` over every kept
//! subset with at least two points, where the first and last segments are
//! extended to the ends of the series. Chord costs for all index pairs are
//! tabulated once in `O(n^3)`; each `alpha` is then solved in `O(n^2)`.

use std::cmp::Ordering;

use super::{line_at, Simplification};
use crate::timeseries::TimeSeries;

/// Relative margin added to the one-segment error so that the saturation
/// penalty beats every multi-segment solution despite rounding.
const SATURATION_MARGIN: f64 = 1e-9;

/// Objective value paired with its segment count; ordered by cost, then by
/// fewer segments.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Score {
    cost: f64,
    segments: u32,
}

impl Score {
    fn beats(self, other: Score) -> bool {
        match self.cost.total_cmp(&other.cost) {
            Ordering::Less => true,
            Ordering::Equal => self.segments < other.segments,
            Ordering::Greater => false,
        }
    }
}

/// Precomputed chord costs for one series.
pub struct OptimalSimplifier {
    values: Vec<f64>,
    /// Squared error strictly between `j` and `k` on the chord `j -> k`.
    inner: Vec<f64>,
    /// Squared error before `j` on the extended chord `j -> k`.
    prefix: Vec<f64>,
    /// Squared error after `k` on the extended chord `j -> k`.
    suffix: Vec<f64>,
}

impl OptimalSimplifier {
    pub fn new(ts: &TimeSeries) -> Self {
        let values = ts.values().to_vec();
        let n = values.len();
        let mut inner = vec![0.0; n * n];
        let mut prefix = vec![0.0; n * n];
        let mut suffix = vec![0.0; n * n];
        for j in 0..n {
            for k in j + 1..n {
                let (yj, yk) = (values[j], values[k]);
                // Folding from +0.0 keeps empty ranges at +0.0 (`sum` gives -0.0).
                let sq = |acc: f64, i: usize| {
                    let r = values[i] - line_at(j, yj, k, yk, i);
                    acc + r * r
                };
                prefix[j * n + k] = (0..j).fold(0.0, sq);
                inner[j * n + k] = (j + 1..k).fold(0.0, sq);
                suffix[j * n + k] = (k + 1..n).fold(0.0, sq);
            }
        }
        Self {
            values,
            inner,
            prefix,
            suffix,
        }
    }

    fn n(&self) -> usize {
        self.values.len()
    }

    /// Squared error of the best single-segment simplification.
    pub fn one_segment_error(&self) -> f64 {
        let n = self.n();
        let mut best = f64::INFINITY;
        for j in 0..n {
            for k in j + 1..n {
                let at = j * n + k;
                best = best.min(self.prefix[at] + self.inner[at] + self.suffix[at]);
            }
        }
        best
    }

    /// A penalty at which the optimum is guaranteed to be a single segment:
    /// the best one-segment error, padded by a tiny relative margin.
    pub fn saturation(&self) -> f64 {
        self.one_segment_error() * (1.0 + SATURATION_MARGIN) + f64::MIN_POSITIVE
    }

    /// Solves for segment penalty `alpha`.
    ///
    /// Ties go to fewer segments, then to the lexicographically smallest
    /// kept-index list.
    pub fn solve(&self, alpha: f64) -> Simplification {
        let n = self.n();
        // Best completion once the segment (j, k) is in place, covering
        // everything from j to the end of the series.
        let mut tail = vec![
            Score {
                cost: 0.0,
                segments: 0
            };
            n * n
        ];
        let mut stops = vec![false; n * n];
        // Best first step from a kept point k: (score of segment (k, l) onward, l).
        let mut from: Vec<Option<(Score, usize)>> = vec![None; n];
        for k in (1..n).rev() {
            let mut best: Option<(Score, usize)> = None;
            for l in k + 1..n {
                let s = tail[k * n + l];
                if best.is_none_or(|(b, _)| s.beats(b)) {
                    best = Some((s, l));
                }
            }
            from[k] = best;
            for j in 0..k {
                let at = j * n + k;
                let base = alpha + self.inner[at];
                let stop = Score {
                    cost: base + self.suffix[at],
                    segments: 1,
                };
                let cont = best.map(|(s, _)| Score {
                    cost: base + s.cost,
                    segments: s.segments + 1,
                });
                match cont {
                    Some(c) if c.beats(stop) => tail[at] = c,
                    _ => {
                        tail[at] = stop;
                        stops[at] = true;
                    }
                }
            }
        }
        let mut start = (0, 1);
        let mut best_total: Option<Score> = None;
        for j in 0..n {
            for k in j + 1..n {
                let at = j * n + k;
                let total = Score {
                    cost: self.prefix[at] + tail[at].cost,
                    segments: tail[at].segments,
                };
                if best_total.is_none_or(|b| total.beats(b)) {
                    best_total = Some(total);
                    start = (j, k);
                }
            }
        }
        let (mut j, mut k) = start;
        let mut kept = vec![j, k];
        while !stops[j * n + k] {
            let (_, l) = from[k].expect("continuation exists when not stopping");
            kept.push(l);
            (j, k) = (k, l);
        }
        Simplification::from_sorted(&self.values, kept)
    }
}

pub fn optimal_simplify(ts: &TimeSeries, alpha: f64) -> Simplification {
    OptimalSimplifier::new(ts).solve(alpha)
}

/// Squared reconstruction error of `s` against `ts` plus `alpha` per segment.
pub fn os_objective(ts: &TimeSeries, s: &Simplification, alpha: f64) -> f64 {
    let recon = s.reconstruct_values();
    let sse: f64 = ts
        .values()
        .iter()
        .zip(&recon)
        .map(|(y, r)| (y - r) * (y - r))
        .sum();
    sse + alpha * s.segment_count() as f64
}
