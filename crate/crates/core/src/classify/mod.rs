//! Classifiers whose decisions loyalty is measured against.
//!
//! Built-in learners (multinomial logistic regression and distance-weighted
//! kNN) are trained here. Predictions from any other model can be supplied
//! as a lookup table keyed by series fingerprint.

mod dtw;
mod external;
mod knn;
mod logreg;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::simplify::{AlgorithmId, ComplexityParam};
use crate::timeseries::{ClassId, LabeledInstance, TimeSeries};

pub use dtw::{dtw_distance, dtw_squared_within, euclidean_distance};
pub use external::ExternalPredictions;
pub use knn::{fit_knn, knn_vote, KnnClassifier, Metric, KNN_WEIGHT_EPSILON};
pub use logreg::{fit_logreg, LogRegConfig, LogRegParams, LogisticRegression};

/// Which version of an instance is being classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Original,
    Simplified {
        algorithm: AlgorithmId,
        /// `alpha_c` in hundredths.
        alpha_c: u32,
    },
}

impl Variant {
    pub fn simplified(algorithm: AlgorithmId, alpha_c: ComplexityParam) -> Self {
        Variant::Simplified {
            algorithm,
            alpha_c: alpha_c.hundredths(),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Original => f.write_str("original"),
            Variant::Simplified { algorithm, alpha_c } => {
                write!(
                    f,
                    "alg={algorithm};ac={}.{:02}",
                    alpha_c / 100,
                    alpha_c % 100
                )
            }
        }
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s == "original" {
            return Ok(Variant::Original);
        }
        let bad = || format!("variant `{s}` is neither `original` nor `alg=<id>;ac=<alpha_c>`");
        let (alg, ac) = s.split_once(';').ok_or_else(bad)?;
        let alg = alg.strip_prefix("alg=").ok_or_else(bad)?;
        let ac = ac.strip_prefix("ac=").ok_or_else(bad)?;
        let algorithm: AlgorithmId = alg.parse().map_err(|e: Error| e.to_string())?;
        let value: f64 = ac.parse().map_err(|_| bad())?;
        let alpha_c = ComplexityParam::new(value).map_err(|e| e.to_string())?;
        Ok(Variant::simplified(algorithm, alpha_c))
    }
}

/// Fingerprint of a series presented to a classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeriesKey<'a> {
    pub dataset: &'a str,
    pub instance_id: usize,
    pub variant: Variant,
}

impl fmt::Display for SeriesKey<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.dataset, self.instance_id, self.variant)
    }
}

/// A trained mapping from fixed-length series to class labels.
///
/// Implementations are immutable after training and may be queried from
/// many threads at once.
pub trait Classifier: Send + Sync {
    fn name(&self) -> &str;

    /// Predicts the class of `series`. `key` identifies the series for
    /// classifiers that look predictions up instead of computing them.
    fn predict(&self, series: &TimeSeries, key: &SeriesKey<'_>) -> Result<ClassId>;

    /// Whether the prediction depends only on the series values, so equal
    /// series may share one prediction.
    fn depends_only_on_values(&self) -> bool {
        true
    }
}

pub(crate) fn check_length(expected: usize, series: &TimeSeries) -> Result<()> {
    if series.len() == expected {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected,
            got: series.len(),
        })
    }
}

/// Fraction of `instances` whose label `clf` reproduces.
pub fn accuracy(clf: &dyn Classifier, dataset: &str, instances: &[LabeledInstance]) -> Result<f64> {
    let mut correct = 0usize;
    for (id, inst) in instances.iter().enumerate() {
        let key = SeriesKey {
            dataset,
            instance_id: id,
            variant: Variant::Original,
        };
        if clf.predict(&inst.series, &key)? == inst.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / instances.len() as f64)
}

/// A classifier choice as given on the command line or in API requests.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierSpec {
    LogReg(LogRegConfig),
    Knn { k: usize, metric: Metric },
    External(PathBuf),
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec::Knn {
            k: 5,
            metric: Metric::Dtw,
        }
    }
}

impl ClassifierSpec {
    /// Short name used in output file names and cache keys.
    pub fn label(&self) -> String {
        match self {
            ClassifierSpec::LogReg(_) => "logreg".into(),
            ClassifierSpec::Knn { k, metric } => {
                let mut s = String::from("knn");
                if *metric == Metric::Euclidean {
                    s.push_str("-euclidean");
                }
                if *k != 5 {
                    s.push_str(&format!("-k{k}"));
                }
                s
            }
            ClassifierSpec::External(_) => "external".into(),
        }
    }

    pub fn build(&self, train: &[LabeledInstance]) -> Result<Box<dyn Classifier>> {
        Ok(match self {
            ClassifierSpec::LogReg(config) => Box::new(fit_logreg(train, config)?),
            ClassifierSpec::Knn { k, metric } => Box::new(fit_knn(train, *k, *metric)?),
            ClassifierSpec::External(path) => Box::new(ExternalPredictions::load(path)?),
        })
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierSpec::External(path) => write!(f, "external:{}", path.display()),
            other => f.write_str(&other.label()),
        }
    }
}

impl FromStr for ClassifierSpec {
    type Err = Error;

    /// Accepts `logreg`, `knn`, `knn-dtw`, `knn-euclidean` and
    /// `external:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("external:") {
            if path.is_empty() {
                return Err(Error::Config(
                    "external classifier needs a file path".into(),
                ));
            }
            return Ok(ClassifierSpec::External(PathBuf::from(path)));
        }
        match s.to_ascii_lowercase().as_str() {
            "logreg" | "logistic" => Ok(ClassifierSpec::LogReg(LogRegConfig::default())),
            "knn" | "knn-dtw" => Ok(ClassifierSpec::Knn { k: 5, metric: Metric::Dtw }),
            "knn-euclidean" => Ok(ClassifierSpec::Knn {
                k: 5,
                metric: Metric::Euclidean,
            }),
            other => Err(Error::Config(format!(
                "unknown classifier `{other}` (expected logreg, knn, knn-euclidean or external:<path>)"
            ))),
        }
    }
}
