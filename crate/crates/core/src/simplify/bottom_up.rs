//! Bottom-up merging of adjacent segs, each fitted by the chord between its
//! original endpoint values.
//!
//! Every point starts as a one-point seg. The adjacent pair whose merged
//! chord has the smallest total absolute deviation is merged first, until
//! that smallest error exceeds the threshold. The kept points are the start
//! and end of every surviving seg, so `s` multi-point segs separated by gaps
//! give `2s - 1` segments.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{line_at, Simplification};
use crate::timeseries::TimeSeries;

/// Sum of `|y(t) - chord(t)|` over `values[a..=b]` for the chord `a -> b`.
pub(crate) fn merge_error(values: &[f64], a: usize, b: usize) -> f64 {
    let (ya, yb) = (values[a], values[b]);
    (a + 1..b).fold(0.0, |acc, t| {
        acc + (values[t] - line_at(a, ya, b, yb, t)).abs()
    })
}

/// One merge of the seg starting at `left_start` with its right neighbour,
/// which ends at `right_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left_start: usize,
    pub right_end: usize,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Pair {
    error: f64,
    left_start: usize,
    left_end: usize,
    right_end: usize,
}

impl PartialEq for Pair {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pair {}

impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pair {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(self.left_start.cmp(&other.left_start))
    }
}

/// Seg bookkeeping indexed by start position.
struct Segs {
    end: Vec<usize>,
    is_start: Vec<bool>,
    prev: Vec<usize>,
}

impl Segs {
    fn trivial(n: usize) -> Self {
        Self {
            end: (0..n).collect(),
            is_start: vec![true; n],
            prev: (0..n).map(|i| i.saturating_sub(1)).collect(),
        }
    }

    fn merge(&mut self, left_start: usize, right_end: usize) {
        let right_start = self.end[left_start] + 1;
        self.is_start[right_start] = false;
        self.end[left_start] = right_end;
        if right_end + 1 < self.end.len() {
            self.prev[right_end + 1] = left_start;
        }
    }

    fn kept_indices(&self) -> Vec<usize> {
        let n = self.end.len();
        let mut kept = Vec::new();
        let mut s = 0;
        while s < n {
            kept.push(s);
            let e = self.end[s];
            if e != s {
                kept.push(e);
            }
            s = e + 1;
        }
        kept
    }
}

fn pair(values: &[f64], segs: &Segs, left_start: usize) -> Option<Pair> {
    let left_end = segs.end[left_start];
    let right_start = left_end + 1;
    if right_start >= values.len() {
        return None;
    }
    let right_end = segs.end[right_start];
    Some(Pair {
        error: merge_error(values, left_start, right_end),
        left_start,
        left_end,
        right_end,
    })
}

/// Runs the greedy merge loop, stopping before the first merge whose error
/// exceeds `stop` (never, when `stop` is `None`).
fn run(values: &[f64], stop: Option<f64>) -> (Vec<Merge>, Segs) {
    let n = values.len();
    let mut segs = Segs::trivial(n);
    let mut heap: BinaryHeap<Reverse<Pair>> = (0..n - 1)
        .filter_map(|s| pair(values, &segs, s))
        .map(Reverse)
        .collect();
    let mut merges = Vec::with_capacity(n - 1);
    while let Some(Reverse(p)) = heap.pop() {
        let right_start = p.left_end + 1;
        let current = segs.is_start[p.left_start]
            && segs.end[p.left_start] == p.left_end
            && segs.is_start[right_start]
            && segs.end[right_start] == p.right_end;
        if !current {
            continue;
        }
        if stop.is_some_and(|limit| p.error > limit) {
            break;
        }
        segs.merge(p.left_start, p.right_end);
        merges.push(Merge {
            left_start: p.left_start,
            right_end: p.right_end,
            error: p.error,
        });
        if p.left_start > 0 {
            let before = segs.prev[p.left_start];
            heap.extend(pair(values, &segs, before).map(Reverse));
        }
        heap.extend(pair(values, &segs, p.left_start).map(Reverse));
    }
    (merges, segs)
}

pub fn bottom_up(ts: &TimeSeries, error_threshold: f64) -> Simplification {
    let (_, segs) = run(ts.values(), Some(error_threshold));
    Simplification::from_sorted(ts.values(), segs.kept_indices())
}

/// The complete merge sequence down to a single seg.
///
/// Because the greedy order does not depend on the threshold, the result for
/// any threshold is the longest prefix of this sequence whose errors all stay
/// within it.
#[derive(Debug, Clone)]
pub struct BottomUpPath {
    merges: Vec<Merge>,
}

impl BottomUpPath {
    pub fn full(values: &[f64]) -> Self {
        Self {
            merges: run(values, None).0,
        }
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Largest merge error along the path; merging is never blocked at or
    /// above this threshold.
    pub fn saturation(&self) -> f64 {
        self.merges.iter().map(|m| m.error).fold(0.0, f64::max)
    }

    pub fn replay(&self, values: &[f64], error_threshold: f64) -> Simplification {
        let mut segs = Segs::trivial(values.len());
        for m in self
            .merges
            .iter()
            .take_while(|m| m.error <= error_threshold)
        {
            segs.merge(m.left_start, m.right_end);
        }
        Simplification::from_sorted(values, segs.kept_indices())
    }
}

pub fn bottom_up_saturation(ts: &TimeSeries) -> f64 {
    BottomUpPath::full(ts.values()).saturation()
}
