use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::simplify::{AlgorithmId, ComplexityParam};

/// Aggregates of one `alpha_c` step of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub alpha_c: f64,
    pub mean_complexity: f64,
    pub loyalty: f64,
    pub kappa: f64,
    pub mean_segments: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationCurve {
    pub dataset: String,
    pub algorithm: AlgorithmId,
    pub classifier: String,
    pub seed: u64,
    /// One point per grid value, ordered by `alpha_c`.
    pub points: Vec<CurvePoint>,
}

pub const CURVE_CSV_HEADER: &str = "alpha_c,mean_complexity,loyalty,kappa,mean_segments";

impl EvaluationCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CURVE_CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(
                out,
                "{:.2},{},{},{},{}",
                p.alpha_c, p.mean_complexity, p.loyalty, p.kappa, p.mean_segments
            );
        }
        out
    }

    pub fn auc(&self) -> f64 {
        auc(&self.points)
    }

    pub fn complexity_at_loyalty(&self, target: f64) -> Option<f64> {
        complexity_at_loyalty(&self.points, target)
    }

    /// Smallest grid `alpha_c` whose loyalty reaches `target`, with its point.
    pub fn min_alpha_for_loyalty(&self, target: f64) -> Option<(ComplexityParam, CurvePoint)> {
        self.points
            .iter()
            .find(|p| p.loyalty >= target)
            .map(|p| (ComplexityParam::new(p.alpha_c).expect("grid alpha_c"), *p))
    }
}

/// Area under the kappa-versus-complexity curve on a 0-100 scale.
///
/// Points are sorted by complexity, points sharing a complexity are merged
/// by averaging their kappa, and kappa is clamped below at 0. The trapezoid
/// integral runs from the smallest complexity to 1 (holding the last kappa
/// flat if the curve stops short of 1) and is divided by that span.
pub fn auc(points: &[CurvePoint]) -> f64 {
    assert!(!points.is_empty(), "auc of an empty curve");
    let mut sorted: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.mean_complexity, p.kappa))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let c = sorted[i].0;
        let mut j = i;
        let mut sum = 0.0;
        while j < sorted.len() && sorted[j].0 == c {
            sum += sorted[j].1;
            j += 1;
        }
        merged.push((c, (sum / (j - i) as f64).max(0.0)));
        i = j;
    }
    let c_min = merged[0].0;
    if c_min >= 1.0 {
        return 100.0 * merged[0].1;
    }
    let last = *merged.last().expect("nonempty");
    if last.0 < 1.0 {
        merged.push((1.0, last.1));
    }
    let integral: f64 = merged
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum();
    (100.0 * integral / (1.0 - c_min)).clamp(0.0, 100.0)
}

/// Smallest mean complexity among points with loyalty at least `target`.
pub fn complexity_at_loyalty(points: &[CurvePoint], target: f64) -> Option<f64> {
    points
        .iter()
        .filter(|p| p.loyalty >= target)
        .map(|p| p.mean_complexity)
        .reduce(f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: f64, loyalty: f64, kappa: f64) -> CurvePoint {
        CurvePoint {
            alpha_c: 0.0,
            mean_complexity: c,
            loyalty,
            kappa,
            mean_segments: 0.0,
        }
    }

    #[test]
    fn unit_kappa_gives_100() {
        let pts: Vec<_> = (1..=10).map(|i| pt(i as f64 / 10.0, 1.0, 1.0)).collect();
        assert!((auc(&pts) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn hand_trapezoid() {
        let a = auc(&[pt(0.1, 0.0, 0.0), pt(0.5, 1.0, 1.0), pt(1.0, 1.0, 1.0)]);
        assert!((a - 100.0 * 0.7 / 0.9).abs() < 1e-12);
    }

    #[test]
    fn negative_kappa_is_clamped_and_duplicates_averaged() {
        let a = auc(&[pt(0.5, 0.0, -0.8), pt(1.0, 1.0, 1.0)]);
        assert!((a - 50.0).abs() < 1e-12);
        // Duplicates at 0.5 average to 0.5.
        let b = auc(&[pt(0.5, 0.0, 0.0), pt(0.5, 0.0, 1.0), pt(1.0, 1.0, 1.0)]);
        assert!((b - 75.0).abs() < 1e-12);
    }

    #[test]
    fn mostly_zero_kappa_approaches_zero() {
        let mut pts: Vec<_> = (0..1000)
            .map(|i| pt(0.001 + i as f64 / 1000.0 * 0.998, 0.0, -0.1))
            .collect();
        pts.push(pt(1.0, 1.0, 1.0));
        assert!(auc(&pts) < 0.2);
    }

    #[test]
    fn degenerate_single_complexity() {
        assert_eq!(auc(&[pt(1.0, 1.0, 1.0)]), 100.0);
        assert_eq!(auc(&[pt(1.0, 1.0, 0.4)]), 40.0);
    }

    #[test]
    fn short_curve_extends_flat() {
        let a = auc(&[pt(0.2, 1.0, 0.5), pt(0.6, 1.0, 0.5)]);
        assert!((a - 50.0).abs() < 1e-12);
    }

    #[test]
    fn loyalty_scan() {
        let pts = [pt(0.1, 0.7, 0.0), pt(0.3, 0.9, 0.0), pt(1.0, 1.0, 1.0)];
        assert_eq!(complexity_at_loyalty(&pts, 0.85), Some(0.3));
        assert_eq!(complexity_at_loyalty(&pts, 1.0), Some(1.0));
        assert_eq!(complexity_at_loyalty(&pts[..2], 0.95), None);
    }
}
