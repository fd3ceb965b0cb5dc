//! Loyalty and kappa of simplifications across the `alpha_c` grid, and the
//! reports built from them.

mod curve;
mod metrics;
mod report;
mod sweep;

pub use curve::{auc, complexity_at_loyalty, CurvePoint, EvaluationCurve, CURVE_CSV_HEADER};
pub use metrics::{cohen_kappa, ConfusionCounts};
pub use report::{aggregate, DatasetResult, Report, LOYALTY_TARGETS};
pub use sweep::{
    check_target, min_alpha_for_loyalty, sweep, sweep_detailed, with_jobs, SweepOutcome,
};

use crate::simplify::Simplification;

/// Fraction of the original points a simplification keeps.
pub fn complexity_of(s: &Simplification) -> f64 {
    s.complexity()
}
