use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use super::{Classifier, SeriesKey, Variant};
use crate::error::{Error, Result};
use crate::timeseries::{ClassId, TimeSeries};

#[derive(Debug, Deserialize)]
struct Row {
    dataset: String,
    instance_id: usize,
    variant: String,
    label: ClassId,
}

/// Predictions made elsewhere, looked up by exact series fingerprint.
///
/// The file is CSV with header `dataset,instance_id,variant,label`.
/// `instance_id` indexes the evaluated split and `label` is the remapped
/// class id.
#[derive(Debug, Clone, Default)]
pub struct ExternalPredictions {
    table: HashMap<(String, usize, Variant), ClassId>,
}

impl ExternalPredictions {
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, path)
    }

    pub fn from_reader(reader: impl std::io::Read, path: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        let expected = ["dataset", "instance_id", "variant", "label"];
        if headers.iter().ne(expected) {
            return Err(parse_err(
                1,
                format!("header must be `{}`", expected.join(",")),
            ));
        }
        let mut table = HashMap::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                parse_err(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let row: Row = record
                .deserialize(Some(&headers))
                .map_err(|e| parse_err(line, e.to_string()))?;
            let variant: Variant = row.variant.parse().map_err(|e| parse_err(line, e))?;
            let key = (row.dataset, row.instance_id, variant);
            if let Some(&prev) = table.get(&key) {
                if prev != row.label {
                    return Err(parse_err(
                        line,
                        format!(
                            "conflicting labels {prev} and {} for {},{},{}",
                            row.label, key.0, key.1, key.2
                        ),
                    ));
                }
            }
            table.insert(key, row.label);
        }
        Ok(ExternalPredictions { table })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Classifier for ExternalPredictions {
    fn name(&self) -> &str {
        "external"
    }

    fn predict(&self, _series: &TimeSeries, key: &SeriesKey<'_>) -> Result<ClassId> {
        self.table
            .get(&(key.dataset.to_string(), key.instance_id, key.variant))
            .copied()
            .ok_or_else(|| Error::MissingPrediction(key.to_string()))
    }

    fn depends_only_on_values(&self) -> bool {
        false
    }
}
