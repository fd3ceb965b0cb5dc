use serde::{Deserialize, Serialize};

use super::{check_length, Classifier, SeriesKey};
use crate::error::{Error, Result};
use crate::timeseries::{ClassId, LabeledInstance, TimeSeries};

/// Training settings for [`fit_logreg`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    /// Coefficient of `‖W‖² / 2` added to the mean cross-entropy. Biases are
    /// not penalized.
    pub l2: f64,
    pub epochs: usize,
    pub lr: f64,
    /// Unused while training is full-batch from zero weights; kept so the
    /// configuration is reproducible if shuffling is ever added.
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2: 0.01,
            epochs: 500,
            lr: 0.1,
            seed: 0,
        }
    }
}

/// Weights (`n_classes × n_features`, row-major) and per-class biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegParams {
    pub n_classes: usize,
    pub n_features: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LogRegParams {
    pub fn zeros(n_classes: usize, n_features: usize) -> Self {
        LogRegParams {
            n_classes,
            n_features,
            weights: vec![0.0; n_classes * n_features],
            bias: vec![0.0; n_classes],
        }
    }

    fn logits(&self, x: &[f64], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            let row = &self.weights[c * self.n_features..(c + 1) * self.n_features];
            *o = self.bias[c] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }

    /// Class probabilities for one feature vector.
    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n_classes];
        self.logits(x, &mut p);
        softmax_in_place(&mut p);
        p
    }

    /// Mean cross-entropy plus `l2 · ‖W‖² / 2`, and its gradient laid out as
    /// `(d weights, d bias)`.
    pub fn loss_and_gradient(&self, data: &[LabeledInstance], l2: f64) -> (f64, LogRegParams) {
        let mut grad = LogRegParams::zeros(self.n_classes, self.n_features);
        let mut loss = 0.0;
        let mut p = vec![0.0; self.n_classes];
        for inst in data {
            let x = inst.series.values();
            self.logits(x, &mut p);
            let lse = log_sum_exp(&p);
            loss += lse - p[inst.label];
            for c in 0..self.n_classes {
                let residual = (p[c] - lse).exp() - if c == inst.label { 1.0 } else { 0.0 };
                grad.bias[c] += residual;
                let row = &mut grad.weights[c * self.n_features..(c + 1) * self.n_features];
                for (g, v) in row.iter_mut().zip(x) {
                    *g += residual * v;
                }
            }
        }
        let n = data.len() as f64;
        loss /= n;
        grad.bias.iter_mut().for_each(|g| *g /= n);
        for (g, w) in grad.weights.iter_mut().zip(&self.weights) {
            *g = *g / n + l2 * w;
        }
        loss += 0.5 * l2 * self.weights.iter().map(|w| w * w).sum::<f64>();
        (loss, grad)
    }
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

fn softmax_in_place(z: &mut [f64]) {
    let lse = log_sum_exp(z);
    z.iter_mut().for_each(|v| *v = (*v - lse).exp());
}

/// A fitted multinomial logistic regression over raw time points.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    params: LogRegParams,
    loss_history: Vec<f64>,
}

impl LogisticRegression {
    pub fn from_params(params: LogRegParams) -> Self {
        LogisticRegression {
            params,
            loss_history: Vec::new(),
        }
    }

    pub fn params(&self) -> &LogRegParams {
        &self.params
    }

    /// Training loss before each epoch, followed by the final loss.
    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }
}

/// Full-batch gradient descent from zero weights.
pub fn fit_logreg(train: &[LabeledInstance], config: &LogRegConfig) -> Result<LogisticRegression> {
    if train.is_empty() {
        return Err(Error::Config(
            "logistic regression needs a nonempty training set".into(),
        ));
    }
    if !(config.l2 >= 0.0 && config.l2.is_finite()) || !(config.lr > 0.0 && config.lr.is_finite()) {
        return Err(Error::Config(format!(
            "logistic regression needs l2 >= 0 and lr > 0 (got l2={}, lr={})",
            config.l2, config.lr
        )));
    }
    let first = train[0].label;
    if train.iter().all(|i| i.label == first) {
        return Err(Error::Config(
            "logistic regression needs at least two classes".into(),
        ));
    }
    let n_classes = train.iter().map(|i| i.label).max().unwrap_or(0) + 1;
    let n_features = train[0].series.len();
    if let Some(bad) = train.iter().find(|i| i.series.len() != n_features) {
        return Err(Error::LengthMismatch {
            expected: n_features,
            got: bad.series.len(),
        });
    }
    let mut params = LogRegParams::zeros(n_classes, n_features);
    let mut loss_history = Vec::with_capacity(config.epochs + 1);
    for _ in 0..config.epochs {
        let (loss, grad) = params.loss_and_gradient(train, config.l2);
        loss_history.push(loss);
        for (w, g) in params.weights.iter_mut().zip(&grad.weights) {
            *w -= config.lr * g;
        }
        for (b, g) in params.bias.iter_mut().zip(&grad.bias) {
            *b -= config.lr * g;
        }
    }
    loss_history.push(params.loss_and_gradient(train, config.l2).0);
    Ok(LogisticRegression {
        params,
        loss_history,
    })
}

impl Classifier for LogisticRegression {
    fn name(&self) -> &str {
        "logreg"
    }

    fn predict(&self, series: &TimeSeries, _key: &SeriesKey<'_>) -> Result<ClassId> {
        check_length(self.params.n_features, series)?;
        let mut z = vec![0.0; self.params.n_classes];
        self.params.logits(series.values(), &mut z);
        let mut best = 0;
        for (c, &v) in z.iter().enumerate() {
            if v > z[best] {
                best = c;
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Variant;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

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

    // TimeSeries needs two points, so the one-feature toy carries a constant
    // zero column.
    fn toy() -> Vec<LabeledInstance> {
        vec![
            inst(&[-2.0, 0.0], 0),
            inst(&[-1.0, 0.0], 0),
            inst(&[1.0, 0.0], 1),
            inst(&[2.0, 0.0], 1),
        ]
    }

    #[test]
    fn separable_toy_is_learned() {
        let config = LogRegConfig {
            l2: 0.0,
            epochs: 200,
            lr: 0.1,
            seed: 0,
        };
        let clf = fit_logreg(&toy(), &config).unwrap();
        for t in toy() {
            assert_eq!(clf.predict(&t.series, &KEY).unwrap(), t.label);
        }
    }

    #[test]
    fn untrained_model_picks_lowest_class() {
        let clf = LogisticRegression::from_params(LogRegParams::zeros(3, 4));
        let zeros = TimeSeries::new(vec![0.0; 4]).unwrap();
        assert_eq!(clf.predict(&zeros, &KEY).unwrap(), 0);
    }

    #[test]
    fn single_class_is_rejected() {
        let data = vec![inst(&[1.0, 2.0], 0), inst(&[2.0, 2.0], 0)];
        assert!(matches!(
            fit_logreg(&data, &LogRegConfig::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn loss_is_non_increasing_at_small_lr() {
        let config = LogRegConfig {
            l2: 0.01,
            epochs: 300,
            lr: 0.01,
            seed: 0,
        };
        let three = vec![
            inst(&[0.0, 1.0, 0.0], 0),
            inst(&[0.2, 1.1, 0.1], 0),
            inst(&[1.0, 0.0, 0.0], 1),
            inst(&[0.9, 0.2, 0.0], 1),
            inst(&[0.0, 0.0, 1.0], 2),
            inst(&[0.1, -0.2, 1.3], 2),
        ];
        for data in [toy(), three] {
            let clf = fit_logreg(&data, &config).unwrap();
            for w in clf.loss_history().windows(2) {
                assert!(w[1] <= w[0] + 1e-15, "loss rose from {} to {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data: Vec<LabeledInstance> = (0..8)
            .map(|i| {
                let v: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
                inst(&v, i % 2)
            })
            .collect();
        let mut params = LogRegParams::zeros(2, 5);
        params
            .weights
            .iter_mut()
            .for_each(|w| *w = rng.random_range(-1.0..1.0));
        params
            .bias
            .iter_mut()
            .for_each(|b| *b = rng.random_range(-1.0..1.0));
        let l2 = 0.3;
        let (_, grad) = params.loss_and_gradient(&data, l2);
        let h = 1e-6;
        let numeric = |perturb: &dyn Fn(&mut LogRegParams, f64)| {
            let mut plus = params.clone();
            perturb(&mut plus, h);
            let mut minus = params.clone();
            perturb(&mut minus, -h);
            (plus.loss_and_gradient(&data, l2).0 - minus.loss_and_gradient(&data, l2).0) / (2.0 * h)
        };
        let check = |analytic: f64, fd: f64| {
            let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-8);
            assert!(rel < 1e-5, "analytic {analytic} vs numeric {fd}");
        };
        for j in 0..params.weights.len() {
            check(grad.weights[j], numeric(&|p, d| p.weights[j] += d));
        }
        for c in 0..2 {
            check(grad.bias[c], numeric(&|p, d| p.bias[c] += d));
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let clf = fit_logreg(&toy(), &LogRegConfig::default()).unwrap();
        let p = clf.params().probabilities(&[0.5, 0.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
