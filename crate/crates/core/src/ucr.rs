//! Reader and writer for the UCR archive's tab-separated layout.
//!
//! Each nonempty line is `label<TAB>v1<TAB>...<TAB>vn`. Runs of spaces are
//! accepted as separators too. Labels are remapped to `0..k` in ascending
//! numeric order of the raw label values.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::timeseries::{Dataset, LabeledInstance, TimeSeries};

/// One parsed line before label remapping.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub label_token: String,
    pub label_value: f64,
    pub values: TimeSeries,
}

pub fn parse_raw(path: &Path) -> Result<Vec<RawInstance>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_raw_str(&text, path)
}

fn parse_raw_str(text: &str, path: &Path) -> Result<Vec<RawInstance>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut out: Vec<RawInstance> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let mut tokens = line.split_whitespace();
        let Some(label_token) = tokens.next() else {
            continue;
        };
        let label_value: f64 = label_token
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| parse_err(line_no, format!("label `{label_token}` is not numeric")))?;
        let values = tokens
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| parse_err(line_no, format!("value `{tok}` is not numeric")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let values = TimeSeries::new(values).map_err(|e| parse_err(line_no, e.to_string()))?;
        if let Some(first) = out.first() {
            if first.values.len() != values.len() {
                return Err(Error::Format {
                    path: path.to_path_buf(),
                    message: format!(
                        "line {line_no} has {} values, expected {}",
                        values.len(),
                        first.values.len()
                    ),
                });
            }
        }
        out.push(RawInstance {
            label_token: label_token.to_string(),
            label_value,
            values,
        });
    }
    if out.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "file contains no instances".into(),
        });
    }
    Ok(out)
}

/// Sorted distinct label values, each with the first token seen for it.
fn label_table<'a>(raws: impl Iterator<Item = &'a RawInstance>) -> Vec<(f64, String)> {
    let mut table: Vec<(f64, String)> = Vec::new();
    for raw in raws {
        if !table.iter().any(|(v, _)| *v == raw.label_value) {
            table.push((raw.label_value, raw.label_token.clone()));
        }
    }
    table.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    table
}

fn remap(raws: Vec<RawInstance>, table: &[(f64, String)]) -> Vec<LabeledInstance> {
    raws.into_iter()
        .map(|raw| LabeledInstance {
            label: table
                .iter()
                .position(|(v, _)| *v == raw.label_value)
                .expect("label present in table"),
            series: raw.values,
        })
        .collect()
}

/// Parses one UCR file, remapping its labels to `0..k`.
pub fn parse_ucr_tsv(path: &Path) -> Result<Vec<LabeledInstance>> {
    let raws = parse_raw(path)?;
    let table = label_table(raws.iter());
    Ok(remap(raws, &table))
}

pub fn train_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}_TRAIN.tsv"))
}

pub fn test_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}_TEST.tsv"))
}

/// Loads `<name>_TRAIN.tsv` and `<name>_TEST.tsv` with one label mapping
/// shared by both splits.
pub fn load_dataset(dir: &Path, name: &str) -> Result<Dataset> {
    let (train_file, test_file) = (train_path(dir, name), test_path(dir, name));
    if !train_file.is_file() && !test_file.is_file() {
        return Err(Error::UnknownDataset(name.to_string()));
    }
    let train = parse_raw(&train_file)?;
    let test = parse_raw(&test_file)?;
    if train[0].values.len() != test[0].values.len() {
        return Err(Error::Format {
            path: test_file,
            message: format!(
                "series length {} differs from the training split's {}",
                test[0].values.len(),
                train[0].values.len()
            ),
        });
    }
    let table = label_table(train.iter().chain(&test));
    let raw_labels = table.iter().map(|(_, tok)| tok.clone()).collect();
    Dataset::new(name, remap(train, &table), remap(test, &table), raw_labels)
}

/// Names of every dataset in `dir` that has both a TRAIN and a TEST file.
pub fn discover_datasets(dir: &Path) -> Result<Vec<String>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let file_name = entry.file_name();
        let Some(file_name) = file_name.to_str() else {
            continue;
        };
        if let Some(name) = file_name.strip_suffix("_TRAIN.tsv") {
            if test_path(dir, name).is_file() {
                names.push(name.to_string());
            }
        }
    }
    names.sort();
    Ok(names)
}

/// Reads only the first line of the training file to learn the series length.
pub fn peek_series_length(dir: &Path, name: &str) -> Result<usize> {
    let path = train_path(dir, name);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    text.lines()
        .find(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().count().saturating_sub(1))
        .ok_or_else(|| Error::Format {
            path,
            message: "file contains no instances".into(),
        })
}

/// Serializes instances in UCR layout using `raw_labels[label]` as the label
/// token (or the class id when no table is given).
pub fn to_ucr_string(instances: &[LabeledInstance], raw_labels: Option<&[String]>) -> String {
    let mut out = String::new();
    for inst in instances {
        match raw_labels {
            Some(table) => out.push_str(&table[inst.label]),
            None => {
                let _ = write!(out, "{}", inst.label);
            }
        }
        for v in inst.series.values() {
            let _ = write!(out, "\t{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_ucr_tsv(
    path: &Path,
    instances: &[LabeledInstance],
    raw_labels: Option<&[String]>,
) -> Result<()> {
    fs::write(path, to_ucr_string(instances, raw_labels)).map_err(|e| Error::io(path, e))
}

/// Writes both splits of a dataset as a `<name>_TRAIN.tsv` / `<name>_TEST.tsv` pair.
pub fn write_dataset(dir: &Path, dataset: &Dataset) -> Result<()> {
    let labels = Some(dataset.raw_labels.as_slice());
    write_ucr_tsv(&train_path(dir, &dataset.name), &dataset.train, labels)?;
    write_ucr_tsv(&test_path(dir, &dataset.name), &dataset.test, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Vec<LabeledInstance>> {
        let raws = parse_raw_str(text, Path::new("mem.tsv"))?;
        let table = label_table(raws.iter());
        Ok(remap(raws, &table))
    }

    #[test]
    fn single_line() {
        let insts = parse("1\t0.5\t0.7\t0.9\n").unwrap();
        assert_eq!(insts.len(), 1);
        assert_eq!(insts[0].label, 0);
        assert_eq!(insts[0].series.values(), &[0.5, 0.7, 0.9]);
    }

    #[test]
    fn labels_remapped_in_ascending_order() {
        let insts = parse("1 0 1\n-1 2 3\n1.0\t4\t5\n").unwrap();
        let labels: Vec<_> = insts.iter().map(|i| i.label).collect();
        assert_eq!(labels, vec![1, 0, 1]);
    }

    #[test]
    fn whitespace_runs_and_blank_lines() {
        let insts = parse("\n2   1.0\t 2.0  3.0\n\n3\t1\t2\t3\n").unwrap();
        assert_eq!(insts.len(), 2);
    }

    #[test]
    fn malformed_token_names_line() {
        let err = parse("1\t1\t2\n2\t1\tabc\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ragged_and_empty_are_format_errors() {
        assert!(matches!(
            parse("1\t1\t2\n2\t1\t2\t3\n"),
            Err(Error::Format { .. })
        ));
        assert!(matches!(parse("\n\n"), Err(Error::Format { .. })));
    }

    #[test]
    fn too_few_values_is_parse_error() {
        assert!(matches!(parse("1\t1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn dataset_pair_shares_label_mapping() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("Toy_TRAIN.tsv"), "5\t1\t2\n7\t3\t4\n").unwrap();
        fs::write(dir.path().join("Toy_TEST.tsv"), "7\t1\t2\n3\t3\t4\n").unwrap();
        fs::write(dir.path().join("Lonely_TRAIN.tsv"), "1\t1\t2\n").unwrap();
        let d = load_dataset(dir.path(), "Toy").unwrap();
        assert_eq!(d.raw_labels, vec!["3", "5", "7"]);
        assert_eq!(d.train[0].label, 1);
        assert_eq!(d.test[1].label, 0);
        assert_eq!(d.series_length, 2);
        assert_eq!(discover_datasets(dir.path()).unwrap(), vec!["Toy"]);
        assert!(matches!(
            load_dataset(dir.path(), "Nope"),
            Err(Error::UnknownDataset(_))
        ));
    }

    proptest! {
        #[test]
        fn serialize_then_parse_round_trips(
            rows in prop::collection::vec((0usize..4, prop::collection::vec(-1e6f64..1e6, 5)), 1..12)
        ) {
            let instances: Vec<LabeledInstance> = rows
                .into_iter()
                .map(|(label, values)| LabeledInstance { series: TimeSeries::new(values).unwrap(), label })
                .collect();
            let text = to_ucr_string(&instances, None);
            let raws = parse_raw_str(&text, Path::new("mem.tsv")).unwrap();
            for (raw, inst) in raws.iter().zip(&instances) {
                prop_assert_eq!(raw.label_value, inst.label as f64);
                prop_assert_eq!(raw.values.values(), inst.series.values());
            }
        }
    }
}
