use std::fmt::Write as _;

use super::EvaluationCurve;
use crate::characterize::{DatasetCharacteristics, EntropyBin, Stationarity};
use crate::simplify::AlgorithmId;

/// Loyalty levels reported in the threshold tables.
pub const LOYALTY_TARGETS: [f64; 4] = [0.80, 0.85, 0.90, 0.95];

const EMPTY: &str = "NA";

const AUC_NOTE: &str =
    "# auc: kappa clamped below at 0, trapezoid-integrated over mean complexity \
from the smallest observed complexity to 1, scaled to 0-100";

/// Everything evaluated for one dataset.
#[derive(Debug, Clone)]
pub struct DatasetResult {
    pub name: String,
    pub n_classes: usize,
    pub series_length: usize,
    pub characteristics: DatasetCharacteristics,
    /// At most one curve per algorithm.
    pub curves: Vec<EvaluationCurve>,
}

impl DatasetResult {
    fn curve(&self, alg: AlgorithmId) -> Option<&EvaluationCurve> {
        self.curves.iter().find(|c| c.algorithm == alg)
    }
}

/// CSV texts of the summary and the three report tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: String,
    pub table1: String,
    pub table3: String,
    pub table5: String,
}

fn percent(target: f64) -> u32 {
    (target * 100.0).round() as u32
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn cell(value: Option<f64>) -> String {
    value.map_or_else(|| EMPTY.to_string(), |v| v.to_string())
}

/// Builds the per-curve summary, the AUC table grouped by dataset
/// characteristics, mean complexity at each loyalty target, and per-dataset
/// segment counts at the smallest `alpha_c` reaching each target.
pub fn aggregate(results: &[DatasetResult], algorithms: &[AlgorithmId]) -> Report {
    Report {
        summary: summary(results, algorithms),
        table1: table1(results, algorithms),
        table3: table3(results, algorithms),
        table5: table5(results, algorithms),
    }
}

fn summary(results: &[DatasetResult], algorithms: &[AlgorithmId]) -> String {
    let mut out = format!("{AUC_NOTE}\ndataset,algorithm,classifier,seed,auc");
    for t in LOYALTY_TARGETS {
        let _ = write!(out, ",complexity_at_{}", percent(t));
    }
    for t in LOYALTY_TARGETS {
        let _ = write!(out, ",alpha_c_at_{}", percent(t));
    }
    out.push('\n');
    for r in results {
        for &alg in algorithms {
            let Some(curve) = r.curve(alg) else { continue };
            let _ = write!(
                out,
                "{},{},{},{},{}",
                r.name,
                alg,
                curve.classifier,
                curve.seed,
                curve.auc()
            );
            for t in LOYALTY_TARGETS {
                let _ = write!(out, ",{}", cell(curve.complexity_at_loyalty(t)));
            }
            for t in LOYALTY_TARGETS {
                let alpha = curve
                    .min_alpha_for_loyalty(t)
                    .map(|(a, _)| format!("{:.2}", a.value()));
                let _ = write!(out, ",{}", alpha.as_deref().unwrap_or(EMPTY));
            }
            out.push('\n');
        }
    }
    out
}

fn table1(results: &[DatasetResult], algorithms: &[AlgorithmId]) -> String {
    type Filter = fn(&DatasetResult) -> bool;
    let groups: [(&str, Filter); 11] = [
        ("Mean", |_| true),
        ("Binary", |r| r.n_classes == 2),
        ("Multiclass", |r| r.n_classes > 2),
        ("Stationary", |r| {
            r.characteristics.stationarity == Stationarity::Stationary
        }),
        ("Non-Stationary", |r| {
            r.characteristics.stationarity == Stationarity::NonStationary
        }),
        ("Partially-Stationary", |r| {
            r.characteristics.stationarity == Stationarity::PartiallyStationary
        }),
        ("Seasonal", |r| r.characteristics.seasonal),
        ("Non-Seasonal", |r| !r.characteristics.seasonal),
        ("Low-Entropy", |r| {
            r.characteristics.entropy_bin == EntropyBin::Low
        }),
        ("Medium-Entropy", |r| {
            r.characteristics.entropy_bin == EntropyBin::Medium
        }),
        ("High-Entropy", |r| {
            r.characteristics.entropy_bin == EntropyBin::High
        }),
    ];
    let mut out = format!("{AUC_NOTE}\nmetric");
    for alg in algorithms {
        let _ = write!(out, ",{alg}");
    }
    out.push_str(",datasets\n");
    for (label, keep) in groups {
        let members: Vec<&DatasetResult> = results.iter().filter(|r| keep(r)).collect();
        out.push_str(label);
        for &alg in algorithms {
            let aucs: Vec<f64> = members
                .iter()
                .filter_map(|r| r.curve(alg))
                .map(|c| c.auc())
                .collect();
            let _ = write!(out, ",{}", cell(mean(&aucs)));
        }
        let _ = writeln!(out, ",{}", members.len());
    }
    out
}

fn table3(results: &[DatasetResult], algorithms: &[AlgorithmId]) -> String {
    let mut out = String::from("loyalty");
    for alg in algorithms {
        let _ = write!(out, ",{alg}");
    }
    out.push('\n');
    for t in LOYALTY_TARGETS {
        let _ = write!(out, "{t:.2}");
        for &alg in algorithms {
            let values: Vec<f64> = results
                .iter()
                .filter_map(|r| r.curve(alg))
                .filter_map(|c| c.complexity_at_loyalty(t))
                .collect();
            let _ = write!(out, ",{}", cell(mean(&values)));
        }
        out.push('\n');
    }
    out
}

fn table5(results: &[DatasetResult], algorithms: &[AlgorithmId]) -> String {
    let mut out = String::from("name,classes,length,stationarity,seasonal,entropy");
    for alg in algorithms {
        for t in LOYALTY_TARGETS {
            let _ = write!(out, ",{alg}_{}", percent(t));
        }
    }
    out.push('\n');
    for r in results {
        let c = &r.characteristics;
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            r.name, r.n_classes, r.series_length, c.stationarity, c.seasonal, c.mean_entropy
        );
        for &alg in algorithms {
            for t in LOYALTY_TARGETS {
                let segments = r
                    .curve(alg)
                    .and_then(|curve| curve.min_alpha_for_loyalty(t))
                    .map(|(_, p)| p.mean_segments);
                let _ = write!(out, ",{}", cell(segments));
            }
        }
        out.push('\n');
    }
    out
}
