use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PrototypeSet;
use crate::classify::{Classifier, SeriesKey, Variant};
use crate::error::{Error, Result};
use crate::simplify::{simplify, AlgorithmId, ComplexityParam, Simplification};
use crate::timeseries::{stratified_sample, Dataset, Split};

#[derive(Debug, Clone, PartialEq)]
pub struct BundleOptions {
    pub algorithm: AlgorithmId,
    pub alpha_c: ComplexityParam,
    pub test_count: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for BundleOptions {
    fn default() -> Self {
        BundleOptions {
            algorithm: AlgorithmId::Os,
            alpha_c: ComplexityParam::new(0.2).expect("in range"),
            test_count: 50,
            batch_size: 10,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundleSummary {
    /// Test-split indices per batch, in prompt order.
    pub batches: Vec<Vec<usize>>,
    pub prototype_files: Vec<String>,
}

fn series_csv(s: &Simplification) -> String {
    let recon = s.reconstruct_values();
    let mut kept = vec![false; recon.len()];
    for &i in s.kept_indices() {
        kept[i] = true;
    }
    let mut out = String::from("t,value,kept\n");
    for (t, v) in recon.iter().enumerate() {
        let _ = writeln!(out, "{t},{v},{}", u8::from(kept[t]));
    }
    out
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn prompt_text(
    protos: &PrototypeSet,
    files: &[(usize, Vec<String>)],
    batches: &[Vec<String>],
    batch_size: usize,
) -> String {
    let labels: Vec<String> = protos.classes.iter().map(|c| c.class.to_string()).collect();
    let label_list = labels.join(" or ");
    let mut p = String::new();
    let _ = writeln!(
        p,
        "You will sort time series into class {label_list}. First learn from labelled reference \
series, then label new ones."
    );
    p.push('\n');
    let _ = writeln!(
        p,
        "Every file below holds one series as CSV rows `t,value,kept`. Rows with kept=1 are the \
retained points; the values in between lie on straight lines joining them."
    );
    p.push('\n');
    p.push_str("Steps:\n");
    let _ = writeln!(
        p,
        "1. Look over the {} reference series of each class and note what they share.",
        protos.k_per_class
    );
    p.push_str("2. Hold every unlabelled series against those traits.\n");
    p.push_str("3. Justify each decision in a sentence or two.\n");
    let _ = writeln!(
        p,
        "4. End with one line per unlabelled series reading `Predicted class: <{label_list}>`."
    );
    p.push('\n');
    let _ = writeln!(
        p,
        "Unlabelled series arrive in batches of {batch_size}; answer every series of a batch, in order."
    );
    for (class, names) in files {
        p.push('\n');
        let _ = writeln!(p, "Class {class} references ({}):", names.len());
        for name in names {
            let _ = writeln!(p, "  {name}");
        }
    }
    for (b, names) in batches.iter().enumerate() {
        p.push('\n');
        let _ = writeln!(p, "Batch {} ({} series):", b + 1, names.len());
        for name in names {
            let _ = writeln!(p, "  {name}");
        }
    }
    p
}

/// Writes simplified prototypes, simplified test batches, a prompt and an
/// answer key holding `clf`'s labels for the original test series.
///
/// Layout under `out`: `prompt.txt`, `answer_key.csv`,
/// `prototypes/class_<c>_<j>.csv`, `batch_<bb>/test_<id>.csv`.
pub fn export_prompt_bundle(
    dataset: &Dataset,
    protos: &PrototypeSet,
    clf: &dyn Classifier,
    opts: &BundleOptions,
    out: &Path,
) -> Result<BundleSummary> {
    if dataset.n_classes() != 2 {
        return Err(Error::Config(format!(
            "prompt bundles need a binary dataset; `{}` has {} classes",
            dataset.name,
            dataset.n_classes()
        )));
    }
    if opts.test_count == 0 || opts.batch_size == 0 {
        return Err(Error::Config(
            "test count and batch size must be positive".into(),
        ));
    }
    if dataset.test.len() < opts.test_count {
        return Err(Error::Config(format!(
            "`{}` has {} test instances, fewer than the {} requested",
            dataset.name,
            dataset.test.len(),
            opts.test_count
        )));
    }
    let proto_dir = out.join("prototypes");
    fs::create_dir_all(&proto_dir).map_err(|e| Error::io(&proto_dir, e))?;

    let mut proto_files = Vec::new();
    let mut all_proto_files = Vec::new();
    for class in &protos.classes {
        let mut names = Vec::new();
        for (j, p) in class.prototypes.iter().enumerate() {
            let name = format!("prototypes/class_{}_{}.csv", class.class, j + 1);
            let s = simplify(opts.algorithm, &p.series, opts.alpha_c);
            write(&out.join(&name), &series_csv(&s))?;
            names.push(name.clone());
            all_proto_files.push(name);
        }
        proto_files.push((class.class, names));
    }

    // Shuffled so that batches mix classes even when the split is sorted.
    let mut ids: Vec<usize> =
        stratified_sample(&dataset.test, Split::Test, opts.test_count, opts.seed)
            .members
            .iter()
            .map(|m| m.id)
            .collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));

    let mut answer_key = String::from("test_id,batch,label\n");
    let mut batches = Vec::new();
    let mut batch_files = Vec::new();
    for (b, chunk) in ids.chunks(opts.batch_size).enumerate() {
        let dir_name = format!("batch_{:02}", b + 1);
        let dir = out.join(&dir_name);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let mut names = Vec::new();
        for &id in chunk {
            let series = &dataset.test[id].series;
            let key = SeriesKey {
                dataset: &dataset.name,
                instance_id: id,
                variant: Variant::Original,
            };
            let label = clf.predict(series, &key)?;
            let name = format!("{dir_name}/test_{id}.csv");
            write(
                &out.join(&name),
                &series_csv(&simplify(opts.algorithm, series, opts.alpha_c)),
            )?;
            let _ = writeln!(answer_key, "{id},{},{label}", b + 1);
            names.push(name);
        }
        batches.push(chunk.to_vec());
        batch_files.push(names);
    }
    write(&out.join("answer_key.csv"), &answer_key)?;
    write(
        &out.join("prompt.txt"),
        &prompt_text(protos, &proto_files, &batch_files, opts.batch_size),
    )?;
    Ok(BundleSummary {
        batches,
        prototype_files: all_proto_files,
    })
}
