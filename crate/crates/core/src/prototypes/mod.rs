//! Class prototypes (medoids) and teaching bundles built from them.

mod bundle;
mod kmedoids;

use serde::Serialize;

use crate::classify::Metric;
use crate::error::{Error, Result};
use crate::timeseries::{ClassId, Dataset, TimeSeries};

pub use bundle::{export_prompt_bundle, BundleOptions, BundleSummary};
pub use kmedoids::{kmedoids, kmedoids_on_matrix, DistanceMatrix, KMedoids};

pub const DEFAULT_K_PER_CLASS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prototype {
    /// Index in the training split.
    pub instance_id: usize,
    pub series: TimeSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassPrototypes {
    pub class: ClassId,
    pub raw_label: String,
    pub prototypes: Vec<Prototype>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrototypeSet {
    pub dataset: String,
    pub k_per_class: usize,
    pub metric: Metric,
    pub classes: Vec<ClassPrototypes>,
}

/// Medoids of each class's training instances, `k_per_class` per class.
pub fn class_prototypes(
    dataset: &Dataset,
    k_per_class: usize,
    metric: Metric,
    seed: u64,
) -> Result<PrototypeSet> {
    let mut classes = Vec::new();
    for &class in &dataset.classes {
        let members: Vec<(usize, &TimeSeries)> = dataset
            .train
            .iter()
            .enumerate()
            .filter(|(_, inst)| inst.label == class)
            .map(|(i, inst)| (i, &inst.series))
            .collect();
        let raw_label = dataset.raw_labels[class].clone();
        if members.len() < k_per_class {
            return Err(Error::Config(format!(
                "class {raw_label} of `{}` has {} training instances, fewer than k = {k_per_class}",
                dataset.name,
                members.len()
            )));
        }
        let series: Vec<TimeSeries> = members.iter().map(|(_, s)| (*s).clone()).collect();
        let result = kmedoids(&series, k_per_class, metric, seed)?;
        classes.push(ClassPrototypes {
            class,
            raw_label,
            prototypes: result
                .medoids
                .iter()
                .map(|&m| Prototype {
                    instance_id: members[m].0,
                    series: series[m].clone(),
                })
                .collect(),
        });
    }
    Ok(PrototypeSet {
        dataset: dataset.name.clone(),
        k_per_class,
        metric,
        classes,
    })
}
