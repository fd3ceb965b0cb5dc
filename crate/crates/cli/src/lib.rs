//! The `tss` command-line tool.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 when data cannot be
//! read or processed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use tss_core::catalog::{eligible_datasets, load_normalized, sample_pool};
use tss_core::characterize::{characterize_dataset, DatasetCharacteristics};
use tss_core::classify::Metric;
use tss_core::evaluate::{aggregate, sweep, DatasetResult};
use tss_core::prototypes::{
    class_prototypes, export_prompt_bundle, BundleOptions, DEFAULT_K_PER_CLASS,
};
use tss_core::simplify::simplify;
use tss_core::synthetic::synthetic_dataset;
use tss_core::ucr::write_dataset;
use tss_core::{AlgorithmId, ClassifierSpec, ComplexityParam, Dataset, Split};
use tss_server::{ServerConfig, DEFAULT_PORT};

#[derive(Debug, Parser)]
#[command(
    name = "tss",
    version,
    about = "Time-series simplification and classifier loyalty toolkit"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Directory holding `<Name>_TRAIN.tsv` / `<Name>_TEST.tsv` pairs.
    #[arg(long, env = "TSS_DATA_DIR", global = true)]
    data_dir: Option<PathBuf>,
    /// Output directory for every file a command writes.
    #[arg(long, default_value = "out", global = true)]
    out: PathBuf,
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// With `--dataset all`, keep only datasets whose series are shorter than this.
    #[arg(long, default_value_t = 200, global = true)]
    max_len: usize,
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,
    /// Instances per sample pool.
    #[arg(long, default_value_t = 100, global = true)]
    sample_size: usize,
    /// Split the sample pool is drawn from.
    #[arg(long, default_value = "test", global = true)]
    split: Split,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stationarity, seasonality and entropy descriptors per dataset.
    Characterize {
        #[arg(long, default_value = "all")]
        dataset: String,
    },
    /// Loyalty curves, summary and report tables.
    Evaluate {
        #[arg(long, default_value = "all")]
        dataset: String,
        /// rdp, vw, bu, os or all.
        #[arg(long, default_value = "all", value_parser = parse_algorithms)]
        algorithm: AlgorithmChoice,
        /// logreg, knn, knn-euclidean or external:<path>.
        #[arg(long, default_value = "knn", value_parser = parse_classifier)]
        classifier: ClassifierSpec,
    },
    /// Prints one simplification as JSON.
    Simplify {
        #[arg(long)]
        dataset: String,
        #[arg(long)]
        instance: usize,
        #[arg(long, value_parser = parse_algorithm)]
        algorithm: AlgorithmId,
        #[arg(long, value_parser = parse_alpha)]
        alpha_c: ComplexityParam,
    },
    /// Per-class k-medoid prototypes of the training split.
    Prototypes {
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value_t = DEFAULT_K_PER_CLASS)]
        k: usize,
        #[arg(long, default_value = "dtw")]
        metric: Metric,
    },
    /// Writes simplified prototypes, test batches, prompt and answer key.
    ExportBundle {
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value = "os", value_parser = parse_algorithm)]
        algorithm: AlgorithmId,
        #[arg(long, default_value = "0.2", value_parser = parse_alpha)]
        alpha_c: ComplexityParam,
        #[arg(long, default_value_t = 50)]
        tests: usize,
        #[arg(long, default_value_t = 10)]
        batch: usize,
        #[arg(long, default_value_t = DEFAULT_K_PER_CLASS)]
        k: usize,
        #[arg(long, default_value = "dtw")]
        metric: Metric,
        /// Classifier whose labels fill the answer key.
        #[arg(long, default_value = "knn", value_parser = parse_classifier)]
        classifier: ClassifierSpec,
    },
    /// Runs the JSON HTTP server.
    Serve {
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Address to bind.
        #[arg(long, default_value_t = Ipv4Addr::LOCALHOST)]
        host: Ipv4Addr,
        /// Static files to serve next to the API.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
    /// Writes the seeded synthetic pulse dataset to `--out`.
    MakeSynthetic,
}

#[derive(Debug, Clone)]
struct AlgorithmChoice(Vec<AlgorithmId>);

fn parse_algorithm(s: &str) -> Result<AlgorithmId, String> {
    s.parse().map_err(|e: tss_core::Error| e.to_string())
}

fn parse_algorithms(s: &str) -> Result<AlgorithmChoice, String> {
    if s.eq_ignore_ascii_case("all") {
        Ok(AlgorithmChoice(AlgorithmId::ALL.to_vec()))
    } else {
        parse_algorithm(s).map(|a| AlgorithmChoice(vec![a]))
    }
}

fn parse_classifier(s: &str) -> Result<ClassifierSpec, String> {
    s.parse().map_err(|e: tss_core::Error| e.to_string())
}

fn parse_alpha(s: &str) -> Result<ComplexityParam, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    ComplexityParam::new(v).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<tss_core::Error> for Failure {
    fn from(e: tss_core::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

type CliResult<T = ()> = Result<T, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

impl GlobalArgs {
    fn data_dir(&self) -> CliResult<&Path> {
        let dir = self.data_dir.as_deref().ok_or_else(|| {
            Failure::Usage("no data directory; pass --data-dir or set TSS_DATA_DIR".into())
        })?;
        if dir.is_dir() {
            Ok(dir)
        } else {
            Err(Failure::Data(format!(
                "data directory `{}` does not exist",
                dir.display()
            )))
        }
    }

    /// Dataset names selected by `name`, which may be `all`.
    fn select(&self, name: &str) -> CliResult<Vec<String>> {
        let dir = self.data_dir()?;
        if name == "all" {
            Ok(eligible_datasets(dir, self.max_len)?)
        } else {
            Ok(vec![name.to_string()])
        }
    }

    fn load(&self, name: &str) -> CliResult<Dataset> {
        Ok(load_normalized(self.data_dir()?, name)?)
    }

    fn out_dir(&self) -> CliResult<&Path> {
        fs::create_dir_all(&self.out).map_err(|e| io_failure(&self.out, e))?;
        Ok(&self.out)
    }

    fn write(&self, file: &str, contents: &str) -> CliResult {
        let path = self.out_dir()?.join(file);
        fs::write(&path, contents).map_err(|e| io_failure(&path, e))
    }
}

fn execute(cli: Cli) -> CliResult {
    let g = &cli.global;
    if g.jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    match cli.command {
        Command::Characterize { dataset } => characterize(g, &dataset),
        Command::Evaluate {
            dataset,
            algorithm,
            classifier,
        } => evaluate(g, &dataset, &algorithm.0, &classifier),
        Command::Simplify {
            dataset,
            instance,
            algorithm,
            alpha_c,
        } => {
            let d = g.load(&dataset)?;
            let inst = d.split(g.split).get(instance).ok_or_else(|| {
                Failure::Data(format!(
                    "`{dataset}` has no instance {instance} in its {} split",
                    g.split
                ))
            })?;
            let record = simplify(algorithm, &inst.series, alpha_c).to_record(algorithm, alpha_c);
            println!("{}", serde_json::to_string(&record).expect("serializable"));
            Ok(())
        }
        Command::Prototypes { dataset, k, metric } => {
            let d = g.load(&dataset)?;
            let set = class_prototypes(&d, k, metric, g.seed)?;
            for c in &set.classes {
                let ids: Vec<String> = c
                    .prototypes
                    .iter()
                    .map(|p| p.instance_id.to_string())
                    .collect();
                println!("class {}: {}", c.raw_label, ids.join(" "));
            }
            let json = serde_json::to_string_pretty(&set).expect("serializable");
            g.write(&format!("prototypes_{dataset}.json"), &json)
        }
        Command::ExportBundle {
            dataset,
            algorithm,
            alpha_c,
            tests,
            batch,
            k,
            metric,
            classifier,
        } => {
            if tests == 0 || batch == 0 {
                return Err(Failure::Usage(
                    "--tests and --batch must be at least 1".into(),
                ));
            }
            let d = g.load(&dataset)?;
            let protos = class_prototypes(&d, k, metric, g.seed)?;
            let clf = classifier.build(&d.train)?;
            let opts = BundleOptions {
                algorithm,
                alpha_c,
                test_count: tests,
                batch_size: batch,
                seed: g.seed,
            };
            let summary = export_prompt_bundle(&d, &protos, clf.as_ref(), &opts, g.out_dir()?)?;
            println!(
                "wrote {} prototypes and {} batches to {}",
                summary.prototype_files.len(),
                summary.batches.len(),
                g.out.display()
            );
            Ok(())
        }
        Command::Serve { port, host, ui_dir } => {
            let config = ServerConfig {
                data_dir: g.data_dir()?.to_path_buf(),
                jobs: g.jobs,
                sample_size: g.sample_size,
                split: g.split,
                default_seed: g.seed,
                resolve_wait: Duration::from_secs(2),
                ui_dir,
            };
            let addr = SocketAddr::from((host, port));
            let runtime =
                tokio::runtime::Runtime::new().map_err(|e| Failure::Data(e.to_string()))?;
            eprintln!("listening on http://{addr}");
            runtime
                .block_on(tss_server::serve(config, addr))
                .map_err(|e| Failure::Data(format!("server on {addr}: {e}")))
        }
        Command::MakeSynthetic => {
            let d = synthetic_dataset(g.seed);
            write_dataset(g.out_dir()?, &d)?;
            println!("wrote {} to {}", d.name, g.out.display());
            Ok(())
        }
    }
}

fn characterize(g: &GlobalArgs, selector: &str) -> CliResult {
    let mut csv = format!("{}\n", DatasetCharacteristics::CSV_HEADER);
    for name in g.select(selector)? {
        let d = g.load(&name)?;
        let row = characterize_dataset(&d)?.csv_row();
        println!("{row}");
        csv.push_str(&row);
        csv.push('\n');
    }
    g.write("characteristics.csv", &csv)
}

fn evaluate(
    g: &GlobalArgs,
    selector: &str,
    algorithms: &[AlgorithmId],
    spec: &ClassifierSpec,
) -> CliResult {
    let names = g.select(selector)?;
    let clf_label = spec.label();
    let mut results = Vec::with_capacity(names.len());
    let total = names.len() * algorithms.len();
    let mut done = 0;
    let mut stderr = std::io::stderr();
    for name in &names {
        let d = g.load(name)?;
        let clf = spec.build(&d.train)?;
        let pool = sample_pool(&d, g.split, g.sample_size, g.seed);
        let mut curves = Vec::with_capacity(algorithms.len());
        for &alg in algorithms {
            let curve = sweep(alg, clf.as_ref(), name, &pool, g.jobs)?;
            g.write(
                &format!("curve_{name}_{alg}_{clf_label}.csv"),
                &curve.to_csv(),
            )?;
            curves.push(curve);
            done += 1;
            let _ = writeln!(stderr, "[{done}/{total}] {name} {alg}");
        }
        results.push(DatasetResult {
            name: name.clone(),
            n_classes: d.n_classes(),
            series_length: d.series_length,
            characteristics: characterize_dataset(&d)?,
            curves,
        });
    }
    let report = aggregate(&results, algorithms);
    g.write("summary.csv", &report.summary)?;
    g.write("table1.csv", &report.table1)?;
    g.write("table3.csv", &report.table3)?;
    g.write("table5.csv", &report.table5)
}
