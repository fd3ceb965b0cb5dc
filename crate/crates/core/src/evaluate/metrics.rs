use serde::{Deserialize, Serialize};

use crate::timeseries::ClassId;

/// Agreement counts between predictions on originals (rows) and on their
/// simplifications (columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    n_classes: usize,
    counts: Vec<u64>,
}

impl ConfusionCounts {
    pub fn new(n_classes: usize) -> Self {
        ConfusionCounts {
            n_classes,
            counts: vec![0; n_classes * n_classes],
        }
    }

    /// Builds from a square matrix given row by row.
    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let n = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == n),
            "confusion matrix must be square"
        );
        ConfusionCounts {
            n_classes: n,
            counts: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn get(&self, original: ClassId, simplified: ClassId) -> u64 {
        self.counts[original * self.n_classes + simplified]
    }

    pub fn record(&mut self, original: ClassId, simplified: ClassId) {
        let needed = original.max(simplified) + 1;
        if needed > self.n_classes {
            let mut grown = ConfusionCounts::new(needed);
            for i in 0..self.n_classes {
                for j in 0..self.n_classes {
                    grown.counts[i * needed + j] = self.get(i, j);
                }
            }
            *self = grown;
        }
        self.counts[original * self.n_classes + simplified] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes).map(|k| self.get(k, k)).sum()
    }

    pub fn row_sum(&self, k: ClassId) -> u64 {
        (0..self.n_classes).map(|j| self.get(k, j)).sum()
    }

    pub fn col_sum(&self, k: ClassId) -> u64 {
        (0..self.n_classes).map(|i| self.get(i, k)).sum()
    }

    /// Observed agreement `p_0`.
    pub fn loyalty(&self) -> f64 {
        self.trace() as f64 / self.total() as f64
    }

    pub fn kappa(&self) -> f64 {
        cohen_kappa(self)
    }
}

/// Cohen's kappa. When chance agreement is certain (`p_e = 1`) the ratio is
/// undefined; that case returns 1 for perfect agreement and 0 otherwise.
///
/// Evaluated as `(trace·total − Σ row·col) / (total² − Σ row·col)` in integer
/// arithmetic, which equals `(p_0 − p_e) / (1 − p_e)` with a single rounding.
pub fn cohen_kappa(c: &ConfusionCounts) -> f64 {
    let total = c.total() as u128;
    assert!(total > 0, "kappa of an empty confusion matrix");
    let trace = c.trace() as u128;
    let chance: u128 = (0..c.n_classes())
        .map(|k| c.row_sum(k) as u128 * c.col_sum(k) as u128)
        .sum();
    let denominator = total * total - chance;
    if denominator == 0 {
        return if trace == total { 1.0 } else { 0.0 };
    }
    let numerator = (trace * total) as i128 - chance as i128;
    numerator as f64 / denominator as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_examples() {
        assert_eq!(
            cohen_kappa(&ConfusionCounts::from_rows(&[vec![7, 0], vec![0, 3]])),
            1.0
        );
        assert_eq!(
            cohen_kappa(&ConfusionCounts::from_rows(&[vec![25, 25], vec![25, 25]])),
            0.0
        );
        let k = cohen_kappa(&ConfusionCounts::from_rows(&[vec![40, 10], vec![10, 40]]));
        assert_eq!(k, 0.6);
    }

    #[test]
    fn degenerate_marginals() {
        assert_eq!(
            cohen_kappa(&ConfusionCounts::from_rows(&[vec![9, 0], vec![0, 0]])),
            1.0
        );
        // Every original predicted 0, every simplification predicted 1: p_e = 0.
        assert_eq!(
            cohen_kappa(&ConfusionCounts::from_rows(&[vec![0, 9], vec![0, 0]])),
            0.0
        );
    }

    #[test]
    fn record_grows_matrix() {
        let mut c = ConfusionCounts::new(2);
        c.record(0, 0);
        c.record(3, 1);
        assert_eq!(c.n_classes(), 4);
        assert_eq!(c.get(0, 0), 1);
        assert_eq!(c.get(3, 1), 1);
        assert_eq!(c.total(), 2);
        assert_eq!(c.loyalty(), 0.5);
    }
}
