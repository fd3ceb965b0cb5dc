use rayon::prelude::*;

use super::{ConfusionCounts, CurvePoint, EvaluationCurve};
use crate::classify::{Classifier, SeriesKey, Variant};
use crate::error::{Error, Result};
use crate::simplify::{AlgorithmId, ComplexityParam, PreparedSeries, GRID_STEPS};
use crate::timeseries::{ClassId, PoolMember, SamplePool};

/// Runs `f` on a dedicated pool of `jobs` threads, or on rayon's global pool
/// when `jobs` is `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Everything one instance contributes to a sweep.
struct InstanceTrace {
    original: ClassId,
    /// `(kept points, prediction)` per grid step.
    steps: Vec<(usize, ClassId)>,
}

fn trace_instance(
    alg: AlgorithmId,
    clf: &dyn Classifier,
    dataset: &str,
    member: &PoolMember,
) -> Result<InstanceTrace> {
    let series = &member.instance.series;
    let key = |variant| SeriesKey {
        dataset,
        instance_id: member.id,
        variant,
    };
    let original = clf.predict(series, &key(Variant::Original))?;
    let prepared = PreparedSeries::new(alg, series);
    let reuse = clf.depends_only_on_values();
    let mut steps = Vec::with_capacity(GRID_STEPS);
    let mut last: Option<(Vec<usize>, ClassId)> = None;
    for alpha_c in ComplexityParam::grid() {
        let simp = prepared.simplify(alpha_c);
        let kept = simp.kept_indices().len();
        let cached = match &last {
            Some((indices, pred)) if reuse && indices.as_slice() == simp.kept_indices() => {
                Some(*pred)
            }
            _ => None,
        };
        let pred = match cached {
            Some(p) => p,
            None => {
                let p =
                    clf.predict(&simp.reconstruct(), &key(Variant::simplified(alg, alpha_c)))?;
                last = Some((simp.kept_indices().to_vec(), p));
                p
            }
        };
        steps.push((kept, pred));
    }
    Ok(InstanceTrace { original, steps })
}

/// Curve points with the confusion matrix behind each one.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub curve: EvaluationCurve,
    pub confusions: Vec<ConfusionCounts>,
}

/// Simplifies every pool member at every grid `alpha_c` and compares the
/// classifier's decisions on simplifications with those on the originals.
///
/// Instances are processed in parallel; the reduction runs in pool order so
/// the result does not depend on the number of workers.
pub fn sweep_detailed(
    alg: AlgorithmId,
    clf: &dyn Classifier,
    dataset: &str,
    pool: &SamplePool,
    jobs: Option<usize>,
) -> Result<SweepOutcome> {
    let Some(n) = pool.series_length() else {
        return Err(Error::Config(format!(
            "sample pool of `{dataset}` is empty"
        )));
    };
    let traces: Vec<Result<InstanceTrace>> = with_jobs(jobs, || {
        pool.members
            .par_iter()
            .map(|m| trace_instance(alg, clf, dataset, m))
            .collect()
    })?;
    let traces = traces.into_iter().collect::<Result<Vec<_>>>()?;

    let count = traces.len() as f64;
    let mut points = Vec::with_capacity(GRID_STEPS);
    let mut confusions = Vec::with_capacity(GRID_STEPS);
    for (k, alpha_c) in ComplexityParam::grid().enumerate() {
        let mut confusion = ConfusionCounts::new(0);
        let mut complexity = 0.0;
        let mut segments = 0.0;
        for t in &traces {
            let (kept, pred) = t.steps[k];
            confusion.record(t.original, pred);
            complexity += kept as f64 / n as f64;
            segments += (kept - 1) as f64;
        }
        points.push(CurvePoint {
            alpha_c: alpha_c.value(),
            mean_complexity: complexity / count,
            loyalty: confusion.loyalty(),
            kappa: confusion.kappa(),
            mean_segments: segments / count,
        });
        confusions.push(confusion);
    }
    Ok(SweepOutcome {
        curve: EvaluationCurve {
            dataset: dataset.to_string(),
            algorithm: alg,
            classifier: clf.name().to_string(),
            seed: pool.seed,
            points,
        },
        confusions,
    })
}

pub fn sweep(
    alg: AlgorithmId,
    clf: &dyn Classifier,
    dataset: &str,
    pool: &SamplePool,
    jobs: Option<usize>,
) -> Result<EvaluationCurve> {
    sweep_detailed(alg, clf, dataset, pool, jobs).map(|o| o.curve)
}

/// Smallest grid `alpha_c` whose sweep step reaches loyalty `target`, with
/// that step's point. The identity step always qualifies for `target <= 1`.
pub fn min_alpha_for_loyalty(
    alg: AlgorithmId,
    clf: &dyn Classifier,
    dataset: &str,
    pool: &SamplePool,
    target: f64,
    jobs: Option<usize>,
) -> Result<(ComplexityParam, CurvePoint)> {
    check_target(target)?;
    let curve = sweep(alg, clf, dataset, pool, jobs)?;
    Ok(curve
        .min_alpha_for_loyalty(target)
        .expect("identity step has loyalty 1"))
}

pub fn check_target(target: f64) -> Result<()> {
    if target > 0.0 && target <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "loyalty target must lie in (0, 1], got {target}"
        )))
    }
}
