//! Visvalingam-Whyatt simplification with monotone effective areas.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::Simplification;
use crate::timeseries::TimeSeries;

#[inline]
fn triangle_area(a: usize, ya: f64, b: usize, yb: f64, c: usize, yc: f64) -> f64 {
    let (ab, ac) = ((b - a) as f64, (c - a) as f64);
    0.5 * (ab * (yc - ya) - ac * (yb - ya)).abs()
}

/// Heap entry ordered by area, then index.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    area: f64,
    index: usize,
    version: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.area
            .total_cmp(&other.area)
            .then(self.index.cmp(&other.index))
    }
}

/// Runs the elimination until the smallest effective area exceeds `stop`
/// (or every interior point is gone when `stop` is `None`).
///
/// Returns the effective area at which each point was removed; points that
/// survive (including both endpoints) report `f64::INFINITY`.
fn eliminate(values: &[f64], stop: Option<f64>) -> Vec<f64> {
    let n = values.len();
    let mut removed_at = vec![f64::INFINITY; n];
    if n < 3 {
        return removed_at;
    }
    let mut prev: Vec<usize> = (0..n).map(|i| i.saturating_sub(1)).collect();
    let mut next: Vec<usize> = (0..n).map(|i| i + 1).collect();
    let mut version = vec![0u32; n];
    let mut heap = BinaryHeap::with_capacity(n);
    for i in 1..n - 1 {
        let area = triangle_area(i - 1, values[i - 1], i, values[i], i + 1, values[i + 1]);
        heap.push(Reverse(Candidate {
            area,
            index: i,
            version: 0,
        }));
    }
    while let Some(Reverse(c)) = heap.pop() {
        if c.version != version[c.index] {
            continue;
        }
        if stop.is_some_and(|limit| c.area > limit) {
            break;
        }
        let i = c.index;
        removed_at[i] = c.area;
        let (p, q) = (prev[i], next[i]);
        next[p] = q;
        prev[q] = p;
        for j in [p, q] {
            if j == 0 || j == n - 1 {
                continue;
            }
            let (l, r) = (prev[j], next[j]);
            let area = triangle_area(l, values[l], j, values[j], r, values[r]).max(c.area);
            version[j] += 1;
            heap.push(Reverse(Candidate {
                area,
                index: j,
                version: version[j],
            }));
        }
    }
    removed_at
}

/// Repeatedly drops the interior point with the smallest effective triangle
/// area until that area exceeds `area_threshold`.
pub fn vw(ts: &TimeSeries, area_threshold: f64) -> Simplification {
    let removed_at = eliminate(ts.values(), Some(area_threshold));
    let kept = (0..ts.len())
        .filter(|&i| removed_at[i].is_infinite())
        .collect();
    Simplification::from_sorted(ts.values(), kept)
}

/// Effective area of every point when eliminating down to two points.
///
/// Endpoints report 0. Removal order is non-decreasing in this area, so the
/// points kept at threshold `t` are exactly the endpoints plus those with
/// area greater than `t`.
pub fn effective_areas(values: &[f64]) -> Vec<f64> {
    let mut areas = eliminate(values, None);
    let n = areas.len();
    areas[0] = 0.0;
    areas[n - 1] = 0.0;
    areas
}

/// Largest effective area met on the way down to two points.
pub fn vw_saturation(ts: &TimeSeries) -> f64 {
    effective_areas(ts.values()).into_iter().fold(0.0, f64::max)
}
