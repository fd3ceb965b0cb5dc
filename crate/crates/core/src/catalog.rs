//! Locating, loading and sampling datasets the way the command-line tool and
//! the server both need them.

use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::timeseries::{stratified_sample, Dataset, SamplePool, Split};
use crate::ucr;

/// Summary of a dataset found in a data directory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub name: String,
    pub series_length: usize,
    pub n_classes: usize,
    pub n_train: usize,
    pub n_test: usize,
}

impl DatasetInfo {
    pub fn of(dataset: &Dataset) -> Self {
        DatasetInfo {
            name: dataset.name.clone(),
            series_length: dataset.series_length,
            n_classes: dataset.n_classes(),
            n_train: dataset.train.len(),
            n_test: dataset.test.len(),
        }
    }
}

/// Names of datasets in `dir` whose series are shorter than `max_len`.
pub fn eligible_datasets(dir: &Path, max_len: usize) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for name in ucr::discover_datasets(dir)? {
        if ucr::peek_series_length(dir, &name)? < max_len {
            names.push(name);
        }
    }
    Ok(names)
}

/// Loads a dataset and z-normalizes every instance of both splits.
pub fn load_normalized(dir: &Path, name: &str) -> Result<Dataset> {
    Ok(ucr::load_dataset(dir, name)?.znormalized())
}

pub fn sample_pool(dataset: &Dataset, split: Split, size: usize, seed: u64) -> SamplePool {
    stratified_sample(dataset.split(split), split, size, seed)
}
