use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

/// Outcome of an augmented Dickey-Fuller test with a constant term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfResult {
    /// t-ratio of the lagged level; `-inf` when the regression is degenerate.
    pub statistic: f64,
    pub critical_value: f64,
    pub lags: usize,
    pub n_eff: usize,
    pub stationary: bool,
}

/// Smallest regression sample accepted by [`adf_test`].
pub const ADF_MIN_OBS: usize = 10;

/// Schwert's rule, capped so the regression keeps two thirds of the data.
pub fn schwert_lags(n: usize) -> usize {
    let schwert = (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    schwert.min((n - 1) / 3)
}

/// MacKinnon's 5% critical value for the constant-only regression.
pub fn adf_critical_value_5pct(n_eff: usize) -> f64 {
    let n = n_eff as f64;
    -2.8621 - 2.738 / n - 8.36 / (n * n) - 16.786 / (n * n * n)
}

/// Regresses `Δy_t` on `1, y_{t-1}, Δy_{t-1}, …, Δy_{t-p}` and compares the
/// t-ratio of `y_{t-1}` with the 5% critical value.
pub fn adf_test(ts: &TimeSeries) -> Result<AdfResult> {
    let y = ts.values();
    let n = y.len();
    let lags = schwert_lags(n);
    let n_eff = n - 1 - lags;
    if n_eff < ADF_MIN_OBS {
        return Err(Error::TooShort {
            test: "adf",
            message: format!("{n} points leave {n_eff} regression rows after {lags} lags"),
        });
    }
    let critical_value = adf_critical_value_5pct(n_eff);
    let degenerate = AdfResult {
        statistic: f64::NEG_INFINITY,
        critical_value,
        lags,
        n_eff,
        stationary: true,
    };

    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let k = lags + 2;
    // Row r models dy[t] with t = lags + r.
    let x = DMatrix::from_fn(n_eff, k, |r, c| {
        let t = lags + r;
        match c {
            0 => 1.0,
            1 => y[t],
            _ => dy[t - (c - 1)],
        }
    });
    let target = DVector::from_iterator(n_eff, (0..n_eff).map(|r| dy[lags + r]));
    let col_norms: Vec<f64> = (0..k).map(|c| x.column(c).norm()).collect();

    let qr = x.clone().qr();
    let r = qr.r();
    for c in 0..k {
        if !(r[(c, c)].abs() > 1e-9 * col_norms[c]) {
            return Ok(degenerate);
        }
    }
    let qty = qr.q().transpose() * &target;
    let Some(beta) = r.solve_upper_triangular(&qty) else {
        return Ok(degenerate);
    };
    let residuals = &target - &x * &beta;
    let sigma2 = residuals.norm_squared() / (n_eff - k) as f64;
    let Some(r_inv) = r.solve_upper_triangular(&DMatrix::identity(k, k)) else {
        return Ok(degenerate);
    };
    // (XᵀX)⁻¹ = R⁻¹R⁻ᵀ, so its diagonal entry is the squared row norm of R⁻¹.
    let var_rho = sigma2 * r_inv.row(1).norm_squared();
    let statistic = beta[1] / var_rho.sqrt();
    if !statistic.is_finite() {
        return Ok(degenerate);
    }
    Ok(AdfResult {
        statistic,
        critical_value,
        lags,
        n_eff,
        stationary: statistic < critical_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lag_rule() {
        assert_eq!(schwert_lags(200), 14);
        assert_eq!(schwert_lags(100), 12);
        assert_eq!(schwert_lags(20), 6);
        assert_eq!(schwert_lags(16), 5);
    }

    #[test]
    fn constant_series_is_degenerate_stationary() {
        let r = adf_test(&TimeSeries::new(vec![3.0; 50]).unwrap()).unwrap();
        assert!(r.stationary);
        assert_eq!(r.statistic, f64::NEG_INFINITY);
    }

    #[test]
    fn too_short_is_an_error() {
        let ts = TimeSeries::new((0..12).map(|i| (i as f64).sin()).collect()).unwrap();
        assert!(matches!(adf_test(&ts), Err(Error::TooShort { .. })));
    }
}
