//! A small seeded two-class dataset for demos and end-to-end checks.
//!
//! Class 0 is a wide triangular pulse centred in the series, class 1 a flat
//! line with a narrow bump at the same place. Both carry Gaussian noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::timeseries::{Dataset, LabeledInstance, TimeSeries};

pub const SYNTHETIC_NAME: &str = "SyntheticPulse";
pub const SYNTHETIC_LENGTH: usize = 128;
pub const SYNTHETIC_TRAIN: usize = 60;
pub const SYNTHETIC_TEST: usize = 100;
pub const SYNTHETIC_NOISE: f64 = 0.1;

const PULSE_HALF_WIDTH: f64 = 16.0;
const BUMP_HALF_WIDTH: f64 = 3.0;

fn triangle(t: f64, centre: f64, half_width: f64) -> f64 {
    (1.0 - (t - centre).abs() / half_width).max(0.0)
}

/// Noise-free template for `class`.
pub fn template(class: usize, n: usize) -> Vec<f64> {
    let centre = (n - 1) as f64 / 2.0;
    let half = if class == 0 {
        PULSE_HALF_WIDTH
    } else {
        BUMP_HALF_WIDTH
    };
    (0..n).map(|t| triangle(t as f64, centre, half)).collect()
}

fn instances(count: usize, rng: &mut ChaCha8Rng) -> Vec<LabeledInstance> {
    let noise = Normal::new(0.0, SYNTHETIC_NOISE).expect("valid sigma");
    let templates = [template(0, SYNTHETIC_LENGTH), template(1, SYNTHETIC_LENGTH)];
    (0..count)
        .map(|i| {
            let label = i % 2;
            let values = templates[label]
                .iter()
                .map(|v| v + noise.sample(rng))
                .collect();
            LabeledInstance {
                series: TimeSeries::new(values).expect("finite values"),
                label,
            }
        })
        .collect()
}

/// Balanced train/test splits of raw (not normalized) series.
pub fn synthetic_dataset(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train = instances(SYNTHETIC_TRAIN, &mut rng);
    let test = instances(SYNTHETIC_TEST, &mut rng);
    Dataset::new(SYNTHETIC_NAME, train, test, vec!["0".into(), "1".into()])
        .expect("consistent dataset")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_balance() {
        let d = synthetic_dataset(1);
        assert_eq!(d.series_length, 128);
        assert_eq!(d.train.len(), 60);
        assert_eq!(d.test.len(), 100);
        assert_eq!(d.test.iter().filter(|i| i.label == 1).count(), 50);
        let t0 = template(0, 128);
        assert_eq!(t0.iter().cloned().fold(0.0, f64::max), 1.0 - 0.5 / 16.0);
    }

    #[test]
    fn seeded() {
        assert_eq!(
            synthetic_dataset(3).test[7].series,
            synthetic_dataset(3).test[7].series
        );
        assert_ne!(
            synthetic_dataset(3).test[7].series,
            synthetic_dataset(4).test[7].series
        );
    }
}
