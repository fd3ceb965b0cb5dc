//! Ramer-Douglas-Peucker simplification in the `(index, value)` plane.

use super::Simplification;
use crate::timeseries::TimeSeries;

/// Perpendicular distance from `(i, y)` to the line through `(a, ya)` and `(b, yb)`.
#[inline]
fn perpendicular_distance(a: usize, ya: f64, b: usize, yb: f64, i: usize, y: f64) -> f64 {
    let dx = (b - a) as f64;
    let dy = yb - ya;
    (dy * (i - a) as f64 - dx * (y - ya)).abs() / dx.hypot(dy)
}

/// Farthest interior point of `values[a..=b]` from the chord `a -> b`.
/// Ties go to the lowest index.
fn farthest(values: &[f64], a: usize, b: usize) -> Option<(usize, f64)> {
    let (ya, yb) = (values[a], values[b]);
    let mut best: Option<(usize, f64)> = None;
    for i in a + 1..b {
        let d = perpendicular_distance(a, ya, b, yb, i, values[i]);
        if best.is_none_or(|(_, bd)| d > bd) {
            best = Some((i, d));
        }
    }
    best
}

/// Keeps both endpoints and recursively splits any range whose farthest
/// point lies more than `epsilon` from its chord.
pub fn rdp(ts: &TimeSeries, epsilon: f64) -> Simplification {
    let values = ts.values();
    let n = values.len();
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;
    let mut stack = vec![(0, n - 1)];
    while let Some((a, b)) = stack.pop() {
        if let Some((i, d)) = farthest(values, a, b) {
            if d > epsilon {
                keep[i] = true;
                stack.push((i, b));
                stack.push((a, i));
            }
        }
    }
    let kept = (0..n).filter(|&i| keep[i]).collect();
    Simplification::from_sorted(values, kept)
}

/// Largest distance of any point from the chord joining the two endpoints.
pub fn rdp_saturation(ts: &TimeSeries) -> f64 {
    farthest(ts.values(), 0, ts.len() - 1).map_or(0.0, |(_, d)| d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn collinear_collapses() {
        let s = rdp(&ts(&[0.0, 1.0, 2.0, 3.0, 4.0]), 0.5);
        assert_eq!(s.kept_indices(), &[0, 4]);
        assert_eq!(s.segment_count(), 1);
    }

    #[test]
    fn zero_epsilon_keeps_every_bend() {
        let s = rdp(&ts(&[0.0, 2.0, -1.0, 3.0, 0.5, 4.0]), 0.0);
        assert_eq!(s.kept_indices(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn single_peak() {
        let s = rdp(&ts(&[0.0, 0.0, 1.0, 0.0, 0.0]), 0.5);
        assert_eq!(s.kept_indices(), &[0, 2, 4]);
    }

    #[test]
    fn ties_take_lowest_index() {
        // Indices 1 and 3 are equally far from the flat chord.
        let s = rdp(&ts(&[0.0, 1.0, 0.0, 1.0, 0.0]), 0.9);
        assert_eq!(s.kept_indices()[1], 1);
    }

    #[test]
    fn distance_is_perpendicular() {
        // Chord from (0,0) to (2,2); point (1,0) is sqrt(2)/2 away.
        let d = perpendicular_distance(0, 0.0, 2, 2.0, 1, 0.0);
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((rdp_saturation(&ts(&[0.0, 0.0, 2.0])) - d).abs() < 1e-15);
    }

    #[test]
    fn two_points() {
        let s = rdp(&ts(&[1.0, 5.0]), 0.0);
        assert_eq!(s.kept_indices(), &[0, 1]);
        assert_eq!(rdp_saturation(&ts(&[1.0, 5.0])), 0.0);
    }
}
