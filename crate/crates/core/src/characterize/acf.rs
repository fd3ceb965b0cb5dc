use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::timeseries::TimeSeries;

/// ACF values above this at some lag in `[2, n/2]` mark a series seasonal.
pub const SEASONAL_ACF_THRESHOLD: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct Acf {
    /// Autocorrelation at lags `0..n`.
    pub values: Vec<f64>,
    /// Set for zero-variance input, where every lag past 0 is reported as 0.
    pub degenerate: bool,
}

/// Biased sample autocorrelation computed through a zero-padded FFT.
pub fn acf(ts: &TimeSeries) -> Acf {
    let x = ts.values();
    let n = x.len();
    let mean = ts.mean();
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    if centered.iter().all(|&v| v == 0.0) {
        let mut values = vec![0.0; n];
        values[0] = 1.0;
        return Acf {
            values,
            degenerate: true,
        };
    }
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = centered
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let lag0 = buf[0].re;
    let values = buf[..n]
        .iter()
        .map(|c| (c.re / lag0).clamp(-1.0, 1.0))
        .collect();
    Acf {
        values,
        degenerate: false,
    }
}

/// Largest autocorrelation over lags `2..=n/2`, or `None` for degenerate
/// input or series too short to have such lags.
pub fn max_seasonal_acf(ts: &TimeSeries) -> Option<f64> {
    let a = acf(ts);
    let hi = ts.len() / 2;
    if a.degenerate || hi < 2 {
        return None;
    }
    a.values[2..=hi].iter().copied().reduce(f64::max)
}

pub fn is_seasonal(ts: &TimeSeries) -> bool {
    max_seasonal_acf(ts).is_some_and(|m| m > SEASONAL_ACF_THRESHOLD)
}
