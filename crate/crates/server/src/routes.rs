use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use futures::FutureExt;
use serde::Deserialize;
use serde_json::{json, Value};
use tss_core::classify::Metric;
use tss_core::evaluate::{check_target, EvaluationCurve};
use tss_core::simplify::simplify as run_simplify;
use tss_core::ucr::discover_datasets;
use tss_core::{AlgorithmId, ComplexityParam, Simplification, Split};

use crate::error::ApiError;
use crate::state::{ApiResult, AppState, CurveFuture, CurveKey, Job, JobKind};

type AppStateRef = State<Arc<AppState>>;

/// Runs cache lookups and computation off the async workers.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(ApiError::internal(format!("worker failed: {e}"))))
}

fn parse_algorithm(text: &str) -> ApiResult<AlgorithmId> {
    Ok(text.parse::<AlgorithmId>()?)
}

fn simplification_json(s: &Simplification) -> Value {
    json!({
        "kept_indices": s.kept_indices(),
        "kept_values": s.kept_values(),
        "segment_count": s.segment_count(),
        "complexity": s.complexity(),
        "reconstructed": s.reconstruct_values(),
    })
}

pub async fn list_datasets(State(state): AppStateRef) -> ApiResult<Json<Value>> {
    blocking(move || {
        let names = discover_datasets(&state.config.data_dir)?;
        let entries = names
            .iter()
            .map(|name| match state.dataset(name) {
                Err(e) => json!({ "name": name, "error": e.message }),
                Ok(d) => {
                    let mut entry = json!({
                        "name": name,
                        "length": d.series_length,
                        "classes": d.n_classes(),
                        "labels": d.raw_labels,
                        "n_train": d.train.len(),
                        "n_test": d.test.len(),
                    });
                    match state.characteristics(name) {
                        Ok(c) => entry["characteristics"] = json!(*c),
                        Err(e) => {
                            entry["characteristics"] = Value::Null;
                            entry["error"] = json!(e.message);
                        }
                    }
                    entry
                }
            })
            .collect();
        Ok(Json(Value::Array(entries)))
    })
    .await
}

#[derive(Deserialize)]
pub struct SimplifyRequest {
    dataset: String,
    instance_id: usize,
    algorithm: String,
    alpha_c: f64,
    #[serde(default)]
    split: Option<Split>,
}

pub async fn simplify(
    State(state): AppStateRef,
    body: Result<Json<SimplifyRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    let algorithm = parse_algorithm(&req.algorithm)?;
    let alpha_c = ComplexityParam::new(req.alpha_c)?;
    let split = req.split.unwrap_or(state.config.split);
    blocking(move || {
        let dataset = state.dataset(&req.dataset)?;
        let instance = dataset.split(split).get(req.instance_id).ok_or_else(|| {
            ApiError::not_found(format!(
                "instance {} not in the {split} split of `{}`",
                req.instance_id, req.dataset
            ))
        })?;
        let s = run_simplify(algorithm, &instance.series, alpha_c);
        let mut body = simplification_json(&s);
        body["dataset"] = json!(req.dataset);
        body["split"] = json!(split);
        body["instance_id"] = json!(req.instance_id);
        body["label"] = json!(dataset.raw_labels[instance.label]);
        body["algorithm"] = json!(algorithm);
        body["alpha_c"] = json!(alpha_c.value());
        body["n"] = json!(s.original_length());
        body["original"] = json!(instance.series.values());
        Ok(Json(body))
    })
    .await
}

fn render(kind: &JobKind, curve: &EvaluationCurve) -> Value {
    match kind {
        JobKind::Resolve { target } => {
            let (alpha_c, point) = curve
                .min_alpha_for_loyalty(*target)
                .expect("identity step has loyalty 1");
            json!({
                "dataset": curve.dataset,
                "algorithm": curve.algorithm,
                "classifier": curve.classifier,
                "seed": curve.seed,
                "loyalty_target": target,
                "alpha_c": alpha_c.value(),
                "achieved_loyalty": point.loyalty,
                "kappa": point.kappa,
                "mean_segments": point.mean_segments,
                "mean_complexity": point.mean_complexity,
            })
        }
        JobKind::Curve => json!({
            "dataset": curve.dataset,
            "algorithm": curve.algorithm,
            "classifier": curve.classifier,
            "seed": curve.seed,
            "auc": curve.auc(),
            "points": curve.points,
        }),
    }
}

/// Waits up to the configured time for `future`, then hands out a job id.
async fn answer_or_job(
    state: &AppState,
    future: CurveFuture,
    kind: JobKind,
) -> ApiResult<Response> {
    match tokio::time::timeout(state.config.resolve_wait, future.clone()).await {
        Ok(result) => {
            let curve = result?;
            Ok(Json(render(&kind, &curve)).into_response())
        }
        Err(_) => {
            let id = state.add_job(Job { kind, future });
            Ok((
                StatusCode::ACCEPTED,
                Json(json!({ "status": "pending", "job_id": id })),
            )
                .into_response())
        }
    }
}

fn curve_key(
    state: &AppState,
    dataset: &str,
    algorithm: &str,
    classifier: Option<&str>,
    seed: Option<u64>,
) -> ApiResult<(CurveKey, tss_core::ClassifierSpec)> {
    let algorithm = parse_algorithm(algorithm)?;
    let spec = state.classifier_spec(classifier)?;
    state.check_dataset(dataset)?;
    let key = CurveKey {
        dataset: dataset.to_string(),
        algorithm,
        classifier: spec.to_string(),
        seed: seed.unwrap_or(state.config.default_seed),
    };
    Ok((key, spec))
}

#[derive(Deserialize)]
pub struct ResolveRequest {
    dataset: String,
    algorithm: String,
    #[serde(default)]
    classifier: Option<String>,
    loyalty_target: f64,
    #[serde(default)]
    seed: Option<u64>,
}

pub async fn resolve_loyalty(
    State(state): AppStateRef,
    body: Result<Json<ResolveRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    check_target(req.loyalty_target)?;
    let (key, spec) = curve_key(
        &state,
        &req.dataset,
        &req.algorithm,
        req.classifier.as_deref(),
        req.seed,
    )?;
    let future = state.curve(key, spec);
    answer_or_job(
        &state,
        future,
        JobKind::Resolve {
            target: req.loyalty_target,
        },
    )
    .await
}

#[derive(Deserialize)]
pub struct CurveQuery {
    dataset: String,
    algorithm: String,
    #[serde(default)]
    classifier: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
}

pub async fn curve(
    State(state): AppStateRef,
    query: Result<Query<CurveQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(q) = query?;
    let (key, spec) = curve_key(
        &state,
        &q.dataset,
        &q.algorithm,
        q.classifier.as_deref(),
        q.seed,
    )?;
    let future = state.curve(key, spec);
    answer_or_job(&state, future, JobKind::Curve).await
}

pub async fn job_status(State(state): AppStateRef, Path(id): Path<u64>) -> ApiResult<Json<Value>> {
    let job = state
        .job(id)
        .ok_or_else(|| ApiError::not_found(format!("unknown job {id}")))?;
    Ok(Json(match job.future.clone().now_or_never() {
        None => json!({ "status": "pending", "job_id": id }),
        Some(Ok(curve)) => {
            json!({ "status": "done", "job_id": id, "result": render(&job.kind, &curve) })
        }
        Some(Err(e)) => json!({ "status": "failed", "job_id": id, "error": e.message }),
    }))
}

#[derive(Deserialize)]
pub struct PrototypeQuery {
    dataset: String,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    algorithm: Option<String>,
    #[serde(default)]
    alpha_c: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    metric: Option<Metric>,
}

pub async fn prototypes(
    State(state): AppStateRef,
    query: Result<Query<PrototypeQuery>, QueryRejection>,
) -> ApiResult<Json<Value>> {
    let Query(q) = query?;
    let algorithm = parse_algorithm(q.algorithm.as_deref().unwrap_or("os"))?;
    let alpha_c = ComplexityParam::new(q.alpha_c.unwrap_or(1.0))?;
    let k = q.k.unwrap_or(tss_core::prototypes::DEFAULT_K_PER_CLASS);
    let metric = q.metric.unwrap_or(Metric::Dtw);
    let seed = q.seed.unwrap_or(state.config.default_seed);
    blocking(move || {
        let set = state.prototype_set(&q.dataset, k, metric, seed)?;
        let classes: Vec<Value> = set
            .classes
            .iter()
            .map(|c| {
                let protos: Vec<Value> = c
                    .prototypes
                    .iter()
                    .map(|p| {
                        let s = run_simplify(algorithm, &p.series, alpha_c);
                        json!({
                            "instance_id": p.instance_id,
                            "raw": p.series.values(),
                            "simplified": simplification_json(&s),
                        })
                    })
                    .collect();
                json!({ "class": c.class, "label": c.raw_label, "prototypes": protos })
            })
            .collect();
        Ok(Json(json!({
            "dataset": set.dataset,
            "k": k,
            "metric": metric,
            "algorithm": algorithm,
            "alpha_c": alpha_c.value(),
            "seed": seed,
            "classes": classes,
        })))
    })
    .await
}
