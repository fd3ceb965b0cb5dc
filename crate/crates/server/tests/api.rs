use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tempfile::TempDir;
use tower::ServiceExt;
use tss_core::catalog::{load_normalized, sample_pool};
use tss_core::classify::Metric;
use tss_core::evaluate::min_alpha_for_loyalty;
use tss_core::prototypes::class_prototypes;
use tss_core::synthetic::{synthetic_dataset, SYNTHETIC_NAME};
use tss_core::ucr::write_dataset;
use tss_core::{AlgorithmId, ClassifierSpec, Split};
use tss_server::{router, AppState, ServerConfig};

fn data_dir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), &synthetic_dataset(7)).unwrap();
    dir
}

fn config(dir: &TempDir) -> ServerConfig {
    let mut c = ServerConfig::new(dir.path());
    c.sample_size = 30;
    c.jobs = Some(2);
    c
}

fn app(dir: &TempDir) -> (Arc<AppState>, Router) {
    let state = AppState::new(config(dir));
    (Arc::clone(&state), router(state))
}

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, bytes)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (status, bytes) = call(app, Request::get(uri).body(Body::empty()).unwrap()).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn post_raw(app: &Router, uri: &str, body: &Value) -> (StatusCode, Vec<u8>) {
    let req = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    call(app, req).await
}

async fn post(app: &Router, uri: &str, body: &Value) -> (StatusCode, Value) {
    let (status, bytes) = post_raw(app, uri, body).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::test]
async fn empty_directory_lists_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let (_, app) = app(&dir);
    let (status, body) = get(&app, "/api/datasets").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!([]));
}

#[tokio::test]
async fn corrupt_dataset_is_listed_with_error() {
    let dir = data_dir();
    std::fs::write(dir.path().join("Broken_TRAIN.tsv"), "1\t0.5\tabc\n").unwrap();
    std::fs::write(dir.path().join("Broken_TEST.tsv"), "1\t0.5\t0.6\n").unwrap();
    let (_, app) = app(&dir);
    let (status, body) = get(&app, "/api/datasets").await;
    assert_eq!(status, StatusCode::OK);
    let entries = body.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["name"], "Broken");
    assert!(entries[0]["error"].as_str().unwrap().contains("abc"));
    assert_eq!(entries[1]["name"], SYNTHETIC_NAME);
    assert_eq!(entries[1]["length"], 128);
    assert_eq!(entries[1]["classes"], 2);
    assert!(entries[1]["characteristics"]["stationarity"].is_string());
    assert!(entries[1].get("error").is_none());
}

#[tokio::test]
async fn simplify_endpoints_and_errors() {
    let dir = data_dir();
    let (_, app) = app(&dir);
    let req = |alpha: f64| json!({"dataset": SYNTHETIC_NAME, "instance_id": 3, "algorithm": "rdp", "alpha_c": alpha});

    let (status, full) = post(&app, "/api/simplify", &req(1.0)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(full["reconstructed"], full["original"]);
    assert_eq!(full["kept_indices"].as_array().unwrap().len(), 128);

    let (_, flat) = post(&app, "/api/simplify", &req(0.0)).await;
    assert_eq!(flat["segment_count"], 1);

    let (_, a) = post_raw(&app, "/api/simplify", &req(0.3)).await;
    let (_, b) = post_raw(&app, "/api/simplify", &req(0.3)).await;
    assert_eq!(a, b);

    let (status, body) = post(&app, "/api/simplify", &req(1.5)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body["error"].is_string());

    let unknown = json!({"dataset": "Nope", "instance_id": 0, "algorithm": "os", "alpha_c": 0.5});
    assert_eq!(
        post(&app, "/api/simplify", &unknown).await.0,
        StatusCode::NOT_FOUND
    );
    let escape = json!({"dataset": "../etc", "instance_id": 0, "algorithm": "os", "alpha_c": 0.5});
    assert_eq!(
        post(&app, "/api/simplify", &escape).await.0,
        StatusCode::NOT_FOUND
    );
    let missing = json!({"dataset": SYNTHETIC_NAME, "instance_id": 100_000, "algorithm": "os", "alpha_c": 0.5});
    assert_eq!(
        post(&app, "/api/simplify", &missing).await.0,
        StatusCode::NOT_FOUND
    );
    let bad_alg =
        json!({"dataset": SYNTHETIC_NAME, "instance_id": 0, "algorithm": "paa", "alpha_c": 0.5});
    assert_eq!(
        post(&app, "/api/simplify", &bad_alg).await.0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
}

#[tokio::test]
async fn resolve_loyalty_matches_core_and_is_cached() {
    let dir = data_dir();
    let (state, app) = app(&dir);
    let req = |target: f64| {
        json!({"dataset": SYNTHETIC_NAME, "algorithm": "rdp", "classifier": "logreg",
               "loyalty_target": target, "seed": 5})
    };

    let (status, first) = post_raw(&app, "/api/resolve-loyalty", &req(0.9)).await;
    assert_eq!(status, StatusCode::OK);
    let (_, second) = post_raw(&app, "/api/resolve-loyalty", &req(0.9)).await;
    assert_eq!(first, second);

    let (_, exact) = post(&app, "/api/resolve-loyalty", &req(1.0)).await;
    assert!(exact["alpha_c"].as_f64().unwrap() <= 1.0);
    assert_eq!(exact["achieved_loyalty"], 1.0);
    assert_eq!(state.sweeps_started(), 1);

    let dataset = load_normalized(dir.path(), SYNTHETIC_NAME).unwrap();
    let clf = "logreg"
        .parse::<ClassifierSpec>()
        .unwrap()
        .build(&dataset.train)
        .unwrap();
    let pool = sample_pool(&dataset, Split::Test, 30, 5);
    let (alpha, point) = min_alpha_for_loyalty(
        AlgorithmId::Rdp,
        clf.as_ref(),
        SYNTHETIC_NAME,
        &pool,
        0.9,
        Some(1),
    )
    .unwrap();
    let first: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(first["alpha_c"].as_f64().unwrap(), alpha.value());
    assert_eq!(first["achieved_loyalty"].as_f64().unwrap(), point.loyalty);
    assert_eq!(
        first["mean_segments"].as_f64().unwrap(),
        point.mean_segments
    );

    assert_eq!(
        post(&app, "/api/resolve-loyalty", &req(0.0)).await.0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    assert_eq!(
        post(&app, "/api/resolve-loyalty", &req(1.2)).await.0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    let unknown = json!({"dataset": "Nope", "algorithm": "rdp", "loyalty_target": 0.9});
    assert_eq!(
        post(&app, "/api/resolve-loyalty", &unknown).await.0,
        StatusCode::NOT_FOUND
    );
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_identical_requests_sweep_once() {
    let dir = data_dir();
    let (state, app) = app(&dir);
    let req = json!({"dataset": SYNTHETIC_NAME, "algorithm": "vw", "classifier": "knn-euclidean",
                     "loyalty_target": 0.95, "seed": 1});
    let calls = (0..8).map(|_| {
        let app = app.clone();
        let req = req.clone();
        tokio::spawn(async move { post_raw(&app, "/api/resolve-loyalty", &req).await })
    });
    let results: Vec<_> = futures::future::join_all(calls)
        .await
        .into_iter()
        .map(|r| r.unwrap())
        .collect();
    for (status, body) in &results {
        assert_eq!(*status, StatusCode::OK);
        assert_eq!(body, &results[0].1);
    }
    assert_eq!(state.sweeps_started(), 1);
}

#[tokio::test]
async fn slow_sweeps_hand_out_pollable_jobs() {
    let dir = data_dir();
    let mut cfg = config(&dir);
    cfg.resolve_wait = Duration::ZERO;
    let app = router(AppState::new(cfg));
    let req = json!({"dataset": SYNTHETIC_NAME, "algorithm": "bu", "classifier": "knn",
                     "loyalty_target": 0.9});
    let (status, pending) = post(&app, "/api/resolve-loyalty", &req).await;
    assert_eq!(status, StatusCode::ACCEPTED);
    assert_eq!(pending["status"], "pending");
    let id = pending["job_id"].as_u64().unwrap();

    let done = loop {
        let (status, body) = get(&app, &format!("/api/jobs/{id}")).await;
        assert_eq!(status, StatusCode::OK);
        if body["status"] == "done" {
            break body;
        }
        assert_eq!(body["status"], "pending");
        tokio::time::sleep(Duration::from_millis(20)).await;
    };
    let result = &done["result"];
    assert_eq!(result["classifier"], "knn5-dtw");
    assert!(result["achieved_loyalty"].as_f64().unwrap() >= 0.9);

    // once finished, the cached sweep answers immediately
    let (status, direct) = post(&app, "/api/resolve-loyalty", &req).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(&direct, result);
    assert_eq!(get(&app, "/api/jobs/999").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn curve_route_returns_every_grid_point() {
    let dir = data_dir();
    let (_, app) = app(&dir);
    let uri = format!("/api/curve?dataset={SYNTHETIC_NAME}&algorithm=vw&classifier=logreg&seed=3");
    let (status, body) = get(&app, &uri).await;
    assert_eq!(status, StatusCode::OK);
    let points = body["points"].as_array().unwrap();
    assert_eq!(points.len(), 101);
    assert_eq!(points[100]["loyalty"], 1.0);
    assert!(body["auc"].as_f64().unwrap() > 0.0);
    assert_eq!(
        get(&app, "/api/curve?dataset=Nope&algorithm=vw").await.0,
        StatusCode::NOT_FOUND
    );
    assert_eq!(
        get(
            &app,
            &format!(
                "/api/curve?dataset={SYNTHETIC_NAME}&algorithm=vw&classifier=external:/etc/passwd"
            )
        )
        .await
        .0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
}

#[tokio::test]
async fn prototypes_route() {
    let dir = data_dir();
    let (_, app) = app(&dir);
    let (status, one) = get(
        &app,
        &format!("/api/prototypes?dataset={SYNTHETIC_NAME}&k=1"),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let classes = one["classes"].as_array().unwrap();
    let total: usize = classes
        .iter()
        .map(|c| c["prototypes"].as_array().unwrap().len())
        .sum();
    assert_eq!(total, 2);
    for c in classes {
        for p in c["prototypes"].as_array().unwrap() {
            assert_eq!(p["simplified"]["reconstructed"], p["raw"]);
        }
    }

    let (_, three) = get(
        &app,
        &format!("/api/prototypes?dataset={SYNTHETIC_NAME}&k=3&algorithm=os&alpha_c=0.1&seed=9"),
    )
    .await;
    let dataset = load_normalized(dir.path(), SYNTHETIC_NAME).unwrap();
    let core = class_prototypes(&dataset, 3, Metric::Dtw, 9).unwrap();
    for (c, expected) in three["classes"]
        .as_array()
        .unwrap()
        .iter()
        .zip(&core.classes)
    {
        let ids: Vec<u64> = c["prototypes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| p["instance_id"].as_u64().unwrap())
            .collect();
        let want: Vec<u64> = expected
            .prototypes
            .iter()
            .map(|p| p.instance_id as u64)
            .collect();
        assert_eq!(ids, want);
        assert!(
            c["prototypes"][0]["simplified"]["segment_count"]
                .as_u64()
                .unwrap()
                < 127
        );
    }

    let (status, body) = get(
        &app,
        &format!("/api/prototypes?dataset={SYNTHETIC_NAME}&k=500"),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body["error"].is_string());
    assert_eq!(
        get(&app, "/api/prototypes?dataset=Nope").await.0,
        StatusCode::NOT_FOUND
    );
}
