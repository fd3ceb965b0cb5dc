use std::collections::HashMap;
use std::hash::Hash;
use std::path::{Component, Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock, RwLock};
use std::time::Duration;

use futures::future::{BoxFuture, FutureExt, Shared};
use tss_core::catalog::{load_normalized, sample_pool};
use tss_core::characterize::{characterize_dataset, DatasetCharacteristics};
use tss_core::classify::Metric;
use tss_core::evaluate::{sweep, EvaluationCurve};
use tss_core::prototypes::{class_prototypes, PrototypeSet};
use tss_core::ucr::{test_path, train_path};
use tss_core::{AlgorithmId, Classifier, ClassifierSpec, Dataset, Split};

use crate::error::ApiError;

/// Settings fixed for the lifetime of a server.
#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub data_dir: PathBuf,
    /// Worker cap for sweeps; `None` uses every core.
    pub jobs: Option<usize>,
    pub sample_size: usize,
    pub split: Split,
    pub default_seed: u64,
    /// How long a request waits for a sweep before answering with a job id.
    pub resolve_wait: Duration,
    /// Static files served for paths outside `/api`.
    pub ui_dir: Option<PathBuf>,
}

impl ServerConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        ServerConfig {
            data_dir: data_dir.into(),
            jobs: None,
            sample_size: 100,
            split: Split::Test,
            default_seed: 42,
            resolve_wait: Duration::from_secs(2),
            ui_dir: None,
        }
    }
}

pub type ApiResult<T> = Result<T, ApiError>;

pub type CurveFuture = Shared<BoxFuture<'static, ApiResult<Arc<EvaluationCurve>>>>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveKey {
    pub dataset: String,
    pub algorithm: AlgorithmId,
    pub classifier: String,
    pub seed: u64,
}

/// What a job was started for, so its status can be rendered.
#[derive(Clone)]
pub enum JobKind {
    Resolve { target: f64 },
    Curve,
}

#[derive(Clone)]
pub struct Job {
    pub kind: JobKind,
    pub future: CurveFuture,
}

/// Append-only map whose entries are computed once, outside the map lock.
struct OnceMap<K, V> {
    cells: RwLock<HashMap<K, Arc<OnceLock<V>>>>,
}

impl<K: Eq + Hash + Clone, V: Clone> OnceMap<K, V> {
    fn new() -> Self {
        OnceMap {
            cells: RwLock::new(HashMap::new()),
        }
    }

    fn get_or_init(&self, key: &K, init: impl FnOnce() -> V) -> V {
        let existing = self.cells.read().unwrap().get(key).cloned();
        let cell = match existing {
            Some(cell) => cell,
            None => self
                .cells
                .write()
                .unwrap()
                .entry(key.clone())
                .or_default()
                .clone(),
        };
        cell.get_or_init(init).clone()
    }
}

type PrototypeKey = (String, usize, Metric, u64);

/// Caches shared by every request. Entries are never replaced once published.
pub struct AppState {
    pub config: ServerConfig,
    datasets: OnceMap<String, ApiResult<Arc<Dataset>>>,
    characteristics: OnceMap<String, ApiResult<Arc<DatasetCharacteristics>>>,
    classifiers: OnceMap<(String, String), ApiResult<Arc<dyn Classifier>>>,
    prototypes: OnceMap<PrototypeKey, ApiResult<Arc<PrototypeSet>>>,
    curves: RwLock<HashMap<CurveKey, CurveFuture>>,
    jobs: RwLock<HashMap<u64, Job>>,
    next_job: AtomicU64,
    sweeps_started: AtomicUsize,
}

impl AppState {
    pub fn new(config: ServerConfig) -> Arc<Self> {
        Arc::new(AppState {
            config,
            datasets: OnceMap::new(),
            characteristics: OnceMap::new(),
            classifiers: OnceMap::new(),
            prototypes: OnceMap::new(),
            curves: RwLock::new(HashMap::new()),
            jobs: RwLock::new(HashMap::new()),
            next_job: AtomicU64::new(1),
            sweeps_started: AtomicUsize::new(0),
        })
    }

    /// Number of sweeps computed so far.
    pub fn sweeps_started(&self) -> usize {
        self.sweeps_started.load(Ordering::SeqCst)
    }

    /// Fails with 404 unless both files of `name` exist. Names that could
    /// escape the data directory are treated as unknown.
    pub fn check_dataset(&self, name: &str) -> ApiResult<()> {
        let plain = !name.is_empty()
            && Path::new(name)
                .components()
                .all(|c| matches!(c, Component::Normal(_)));
        let dir = &self.config.data_dir;
        if plain
            && !name.contains(['/', '\\'])
            && train_path(dir, name).is_file()
            && test_path(dir, name).is_file()
        {
            Ok(())
        } else {
            Err(ApiError::not_found(format!("unknown dataset `{name}`")))
        }
    }

    /// Z-normalized dataset. Blocks on first use.
    pub fn dataset(&self, name: &str) -> ApiResult<Arc<Dataset>> {
        self.check_dataset(name)?;
        self.datasets.get_or_init(&name.to_string(), || {
            Ok(Arc::new(load_normalized(&self.config.data_dir, name)?))
        })
    }

    pub fn characteristics(&self, name: &str) -> ApiResult<Arc<DatasetCharacteristics>> {
        let dataset = self.dataset(name)?;
        self.characteristics.get_or_init(&name.to_string(), || {
            Ok(Arc::new(characterize_dataset(&dataset)?))
        })
    }

    /// Parses a classifier choice from a request. External tables must be
    /// given relative to the data directory.
    pub fn classifier_spec(&self, text: Option<&str>) -> ApiResult<ClassifierSpec> {
        let Some(text) = text else {
            return Ok(ClassifierSpec::default());
        };
        match text.parse::<ClassifierSpec>()? {
            ClassifierSpec::External(path) => {
                if !path.components().all(|c| matches!(c, Component::Normal(_))) {
                    return Err(ApiError::unprocessable(
                        "external prediction files must be relative paths inside the data directory",
                    ));
                }
                Ok(ClassifierSpec::External(self.config.data_dir.join(path)))
            }
            spec => Ok(spec),
        }
    }

    pub fn classifier(&self, name: &str, spec: &ClassifierSpec) -> ApiResult<Arc<dyn Classifier>> {
        let dataset = self.dataset(name)?;
        self.classifiers
            .get_or_init(&(name.to_string(), spec.to_string()), || {
                Ok(Arc::from(spec.build(&dataset.train)?))
            })
    }

    pub fn prototype_set(
        &self,
        name: &str,
        k: usize,
        metric: Metric,
        seed: u64,
    ) -> ApiResult<Arc<PrototypeSet>> {
        let dataset = self.dataset(name)?;
        self.prototypes
            .get_or_init(&(name.to_string(), k, metric, seed), || {
                Ok(Arc::new(class_prototypes(&dataset, k, metric, seed)?))
            })
    }

    /// The shared computation of one curve. The first caller starts it on
    /// the blocking pool; later callers join the same future.
    pub fn curve(self: &Arc<Self>, key: CurveKey, spec: ClassifierSpec) -> CurveFuture {
        if let Some(fut) = self.curves.read().unwrap().get(&key) {
            return fut.clone();
        }
        let mut curves = self.curves.write().unwrap();
        if let Some(fut) = curves.get(&key) {
            return fut.clone();
        }
        let state = Arc::clone(self);
        let k = key.clone();
        let handle = tokio::task::spawn_blocking(move || state.compute_curve(&k, &spec));
        let fut = async move {
            match handle.await {
                Ok(result) => result,
                Err(e) => Err(ApiError::internal(format!("sweep task failed: {e}"))),
            }
        }
        .boxed()
        .shared();
        curves.insert(key, fut.clone());
        fut
    }

    fn compute_curve(
        &self,
        key: &CurveKey,
        spec: &ClassifierSpec,
    ) -> ApiResult<Arc<EvaluationCurve>> {
        self.sweeps_started.fetch_add(1, Ordering::SeqCst);
        let dataset = self.dataset(&key.dataset)?;
        let clf = self.classifier(&key.dataset, spec)?;
        let pool = sample_pool(
            &dataset,
            self.config.split,
            self.config.sample_size,
            key.seed,
        );
        let curve = sweep(
            key.algorithm,
            clf.as_ref(),
            &key.dataset,
            &pool,
            self.config.jobs,
        )?;
        Ok(Arc::new(curve))
    }

    pub fn add_job(&self, job: Job) -> u64 {
        let id = self.next_job.fetch_add(1, Ordering::SeqCst);
        self.jobs.write().unwrap().insert(id, job);
        id
    }

    pub fn job(&self, id: u64) -> Option<Job> {
        self.jobs.read().unwrap().get(&id).cloned()
    }
}
