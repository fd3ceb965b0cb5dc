use crate::timeseries::TimeSeries;

pub const APEN_M: usize = 2;
pub const APEN_R_FACTOR: f64 = 0.2;

/// Approximate entropy with tolerance `r_factor · std` (population std),
/// Chebyshev template distance and self-matches counted. Clamped below at 0;
/// zero-variance input gives 0.
pub fn approx_entropy(ts: &TimeSeries, m: usize, r_factor: f64) -> f64 {
    let x = ts.values();
    assert!(m >= 1, "template length must be positive");
    if x.len() < m + 2 {
        return 0.0;
    }
    let std = ts.std();
    if std == 0.0 {
        return 0.0;
    }
    let r = r_factor * std;
    (phi(x, m, r) - phi(x, m + 1, r)).max(0.0)
}

fn phi(x: &[f64], m: usize, r: f64) -> f64 {
    let count = x.len() - m + 1;
    let mut total = 0.0;
    for i in 0..count {
        let a = &x[i..i + m];
        let matches = (0..count)
            .filter(|&j| a.iter().zip(&x[j..j + m]).all(|(p, q)| (p - q).abs() <= r))
            .count();
        total += (matches as f64 / count as f64).ln();
    }
    total / count as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_zero() {
        assert_eq!(
            approx_entropy(&TimeSeries::new(vec![2.0; 40]).unwrap(), 2, 0.2),
            0.0
        );
    }
}
