//! Time-series simplification and classifier loyalty evaluation.

pub mod catalog;
pub mod characterize;
pub mod classify;
pub mod error;
pub mod evaluate;
pub mod prototypes;
pub mod simplify;
pub mod synthetic;
pub mod timeseries;
pub mod ucr;

pub use classify::{Classifier, ClassifierSpec, SeriesKey, Variant};
pub use error::{Error, Result};
pub use simplify::{AlgorithmId, ComplexityParam, Simplification};
pub use timeseries::{ClassId, Dataset, LabeledInstance, SamplePool, Split, TimeSeries};
