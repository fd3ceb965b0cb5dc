//! Stationarity, seasonality and entropy of series and whole datasets.

mod acf;
mod adf;
mod entropy;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::timeseries::{Dataset, TimeSeries};

pub use acf::{acf, is_seasonal, max_seasonal_acf, Acf, SEASONAL_ACF_THRESHOLD};
pub use adf::{adf_critical_value_5pct, adf_test, schwert_lags, AdfResult, ADF_MIN_OBS};
pub use entropy::{approx_entropy, APEN_M, APEN_R_FACTOR};

pub const STATIONARY_MIN_FRACTION: f64 = 0.80;
pub const NON_STATIONARY_MAX_FRACTION: f64 = 0.50;
pub const SEASONAL_MIN_FRACTION: f64 = 0.5;
pub const LOW_ENTROPY_MAX: f64 = 0.23;
pub const MEDIUM_ENTROPY_MAX: f64 = 0.27;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stationarity {
    Stationary,
    NonStationary,
    PartiallyStationary,
}

impl Stationarity {
    pub fn from_fraction(fraction: f64) -> Self {
        if fraction >= STATIONARY_MIN_FRACTION {
            Stationarity::Stationary
        } else if fraction <= NON_STATIONARY_MAX_FRACTION {
            Stationarity::NonStationary
        } else {
            Stationarity::PartiallyStationary
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stationarity::Stationary => "stationary",
            Stationarity::NonStationary => "non_stationary",
            Stationarity::PartiallyStationary => "partially_stationary",
        }
    }
}

impl fmt::Display for Stationarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyBin {
    Low,
    Medium,
    High,
}

impl EntropyBin {
    pub fn from_mean(mean_entropy: f64) -> Self {
        if mean_entropy <= LOW_ENTROPY_MAX {
            EntropyBin::Low
        } else if mean_entropy <= MEDIUM_ENTROPY_MAX {
            EntropyBin::Medium
        } else {
            EntropyBin::High
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntropyBin::Low => "low",
            EntropyBin::Medium => "medium",
            EntropyBin::High => "high",
        }
    }
}

impl fmt::Display for EntropyBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The three per-series measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceCharacteristics {
    pub adf: AdfResult,
    pub seasonal: bool,
    pub entropy: f64,
}

pub fn characterize_series(ts: &TimeSeries) -> Result<InstanceCharacteristics> {
    Ok(InstanceCharacteristics {
        adf: adf_test(ts)?,
        seasonal: is_seasonal(ts),
        entropy: approx_entropy(ts, APEN_M, APEN_R_FACTOR),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetCharacteristics {
    pub name: String,
    pub stationary_fraction: f64,
    pub stationarity: Stationarity,
    pub seasonal_fraction: f64,
    pub seasonal: bool,
    pub mean_entropy: f64,
    pub entropy_bin: EntropyBin,
    /// Mean approximate entropy above 1, outside the usual reading of the
    /// measure as a value in `[0, 1]`. Reported, not rescaled.
    pub entropy_above_one: bool,
}

impl DatasetCharacteristics {
    /// Aggregates per-instance results given in instance order.
    pub fn from_instances(name: &str, instances: &[InstanceCharacteristics]) -> Self {
        let n = instances.len() as f64;
        let mut stationary = 0usize;
        let mut seasonal = 0usize;
        let mut entropy_sum = 0.0;
        for inst in instances {
            stationary += usize::from(inst.adf.stationary);
            seasonal += usize::from(inst.seasonal);
            entropy_sum += inst.entropy;
        }
        let stationary_fraction = stationary as f64 / n;
        let seasonal_fraction = seasonal as f64 / n;
        let mean_entropy = entropy_sum / n;
        DatasetCharacteristics {
            name: name.to_string(),
            stationary_fraction,
            stationarity: Stationarity::from_fraction(stationary_fraction),
            seasonal_fraction,
            seasonal: seasonal_fraction > SEASONAL_MIN_FRACTION,
            mean_entropy,
            entropy_bin: EntropyBin::from_mean(mean_entropy),
            entropy_above_one: mean_entropy > 1.0,
        }
    }

    pub const CSV_HEADER: &'static str =
        "name,stationary_fraction,stationarity,seasonal_fraction,seasonal,mean_entropy,entropy_bin";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.name,
            self.stationary_fraction,
            self.stationarity,
            self.seasonal_fraction,
            self.seasonal,
            self.mean_entropy,
            self.entropy_bin
        )
    }
}

/// Characterizes every instance of both splits in parallel; aggregation runs
/// in instance order so results do not depend on scheduling.
pub fn characterize_dataset(dataset: &Dataset) -> Result<DatasetCharacteristics> {
    let series: Vec<&TimeSeries> = dataset
        .train
        .iter()
        .chain(&dataset.test)
        .map(|i| &i.series)
        .collect();
    let per_instance = series
        .par_iter()
        .map(|ts| characterize_series(ts))
        .collect::<Result<Vec<_>>>()?;
    Ok(DatasetCharacteristics::from_instances(
        &dataset.name,
        &per_instance,
    ))
}
