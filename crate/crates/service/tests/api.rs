use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use nextpm::{load_config, SystemConfig};
use nextpm_service::api::router;
use nextpm_service::store::{resolve_state_path, PersistedState, STATE_DIR_ENV, STATE_FILE};
use nextpm_service::Engine;
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture(name: &str) -> SystemConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    load_config(&path).unwrap()
}

fn with_reps(mut config: SystemConfig, reps: u64) -> SystemConfig {
    config.mc.replications = reps;
    config
}

async fn call(engine: &Arc<Engine>, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = router(engine.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn assert_envelope(engine: &Engine, v: &Value) {
    assert_eq!(v["seed"], json!(engine.settings().seed));
    assert_eq!(v["mc"]["replications"], json!(engine.settings().replications));
    assert_eq!(v["config_hash"], json!(engine.config_hash()));
}

fn ids(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

#[tokio::test]
async fn plan_for_a_new_turbine() {
    let engine = Arc::new(Engine::open(fixture("turbine_d5.json"), None).unwrap());
    let (status, v) = call(&engine, "GET", "/plan", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_envelope(&engine, &v);
    let tau = v["plan"]["tau"].as_u64().unwrap();
    assert!((49..=51).contains(&tau), "tau {tau}");
    assert_eq!(ids(&v["plan"]["maintained"]), vec![1, 2, 3, 4]);
    assert_eq!(v["plan"]["s"], json!(0));
    assert_eq!(v["plan"]["r"], json!(80));

    // the plan is stored and served again unchanged
    let (_, again) = call(&engine, "GET", "/plan", None).await;
    assert_eq!(again, v);
}

#[tokio::test]
async fn failure_is_repaired_next_month_and_replans() {
    let engine = Arc::new(Engine::open(with_reps(fixture("turbine_d5.json"), 20_000), None).unwrap());
    let body = json!({ "component": 3, "time": 12.4, "request_id": "f-1" });
    let (status, v) = call(&engine, "POST", "/failure", Some(body.clone())).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_envelope(&engine, &v);
    assert_eq!(v["event"]["time"], json!(13));
    assert_eq!(ids(&v["event"]["corrective"]), vec![3]);
    assert_eq!(v["state"]["s"], json!(13));
    assert_eq!(v["state"]["r"], json!(93));
    assert_eq!(v["om"]["failed"], json!(3));
    assert!(!ids(&v["om"]["opportunistic"]).contains(&3));
    assert_eq!(v["plan"]["s"], json!(13));
    let om_cost: f64 = ids(&v["om"]["opportunistic"])
        .iter()
        .map(|&id| engine.config().components.iter().find(|c| c.id as u64 == id).unwrap().pm_cost)
        .sum();
    assert_eq!(v["event"]["cost"].as_f64().unwrap(), 5.0 + 202.0 + om_cost);

    // replaying the same request changes nothing
    let (status, v) = call(&engine, "POST", "/failure", Some(body)).await;
    assert_eq!(status, StatusCode::CONFLICT, "{v}");
    let (_, h) = call(&engine, "GET", "/history", None).await;
    assert_envelope(&engine, &h);
    assert_eq!(h["events"].as_array().unwrap().len(), 1);
    assert_eq!(h["events"][0]["request_id"], json!("f-1"));
    assert_eq!(h["events"][0]["report"], json!("failure"));
}

#[tokio::test]
async fn bad_failure_reports_are_rejected() {
    let engine = Arc::new(Engine::open(with_reps(fixture("turbine_d5.json"), 2_000), None).unwrap());
    let (_, plan) = call(&engine, "GET", "/plan", None).await;
    let tau = plan["plan"]["tau"].as_f64().unwrap();

    for time in [0.0, -3.0, tau + 0.5, 500.0] {
        let (status, v) = call(
            &engine,
            "POST",
            "/failure",
            Some(json!({ "component": 3, "time": time, "request_id": format!("t{time}") })),
        )
        .await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "time {time}: {v}");
        assert!(v["error"].is_string());
    }
    let (status, _) = call(
        &engine,
        "POST",
        "/failure",
        Some(json!({ "component": 9, "time": 5.0, "request_id": "x" })),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(
        &engine,
        "POST",
        "/failure",
        Some(json!({ "component": 3, "time": 5.0, "request_id": "" })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(
        &engine,
        "POST",
        "/failure",
        Some(json!({ "component": 3, "time": 5.0, "request_id": "y", "config_hash": "abc" })),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&engine, "POST", "/failure", Some(json!({ "component": 3 }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (_, state) = call(&engine, "GET", "/state", None).await;
    assert_eq!(state["events"], json!(0));
    assert_eq!(state["state"]["s"], json!(0));
}

#[tokio::test]
async fn recorded_maintenance_renews_components() {
    let engine = Arc::new(Engine::open(with_reps(fixture("turbine_d5.json"), 2_000), None).unwrap());
    let hash = engine.config_hash().to_string();
    let (status, v) = call(
        &engine,
        "POST",
        "/maintenance",
        Some(json!({ "components": [1, 3], "time": 40, "request_id": "m-1", "config_hash": hash })),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_envelope(&engine, &v);
    assert_eq!(v["event"]["kind"], json!("PM"));
    assert_eq!(v["event"]["cost"].as_f64().unwrap(), 5.0 + 36.75 + 46.75);
    assert_eq!(v["state"]["last_maintenance"], json!([40, 0, 40, 0]));
    assert_eq!(v["state"]["s"], json!(40));

    for (body, want) in [
        (json!({ "components": [2], "time": 40, "request_id": "m-2" }), StatusCode::UNPROCESSABLE_ENTITY),
        (json!({ "components": [2], "time": 241, "request_id": "m-3" }), StatusCode::UNPROCESSABLE_ENTITY),
        (json!({ "components": [], "time": 50, "request_id": "m-4" }), StatusCode::UNPROCESSABLE_ENTITY),
        (json!({ "components": [7], "time": 50, "request_id": "m-5" }), StatusCode::NOT_FOUND),
        (json!({ "components": [2], "time": 50, "request_id": "m-1" }), StatusCode::CONFLICT),
    ] {
        let (status, v) = call(&engine, "POST", "/maintenance", Some(body.clone())).await;
        assert_eq!(status, want, "{body}: {v}");
    }
    let (_, state) = call(&engine, "GET", "/state", None).await;
    assert_envelope(&engine, &state);
    assert_eq!(state["events"], json!(1));
    assert_eq!(state["ages"], json!([0, 40, 0, 40]));
}

#[tokio::test]
async fn whatif_does_not_touch_the_state() {
    let engine = Arc::new(Engine::open(fixture("turbine_d5.json"), None).unwrap());
    let summer = fixture("summer_d5.json");
    let pattern: Vec<f64> = (1..=12).map(|m| summer.calendar.month(m)).collect();
    let (status, v) = call(&engine, "POST", "/whatif", Some(json!({ "calendar": { "pattern": pattern } }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_envelope(&engine, &v);
    let tau = v["plan"]["tau"].as_u64().unwrap();
    assert!((46..=50).contains(&tau), "tau {tau}");
    assert!(ids(&v["plan"]["maintained"]).contains(&3));
    let delta = v["objective_delta"].as_f64().unwrap();
    let current = v["current_objective"].as_f64().unwrap();
    assert!((v["plan"]["objective"].as_f64().unwrap() - current - delta).abs() < 1e-12);

    let (status, _) = call(&engine, "POST", "/whatif", Some(json!({ "lambda": -1.0 }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&engine, "POST", "/whatif", Some(json!({ "calendar": { "pattern": [1.0, 2.0] } }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (_, state) = call(&engine, "GET", "/state", None).await;
    assert_eq!(state["events"], json!(0));
    assert_eq!(state["state"]["s"], json!(0));
}

#[tokio::test]
async fn state_survives_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join(STATE_FILE);
    let config = with_reps(fixture("turbine_d5.json"), 2_000);
    {
        let engine = Arc::new(Engine::open(config.clone(), Some(path.clone())).unwrap());
        let (status, _) = call(
            &engine,
            "POST",
            "/failure",
            Some(json!({ "component": 2, "time": 7.9, "request_id": "a" })),
        )
        .await;
        assert_eq!(status, StatusCode::OK);
        let (status, _) = call(
            &engine,
            "POST",
            "/maintenance",
            Some(json!({ "components": [4], "time": 20, "request_id": "b" })),
        )
        .await;
        assert_eq!(status, StatusCode::OK);
    }
    let saved = PersistedState::load(&path).unwrap();
    assert_eq!(saved.history.len(), 2);
    assert_eq!(saved.replay(&config).unwrap(), saved.state);

    let engine = Arc::new(Engine::open(config.clone(), Some(path.clone())).unwrap());
    assert!(engine.stale().is_none());
    let (_, state) = call(&engine, "GET", "/state", None).await;
    assert_eq!(state["state"]["s"], json!(20));
    assert_eq!(state["events"], json!(2));
    let (status, _) = call(
        &engine,
        "POST",
        "/maintenance",
        Some(json!({ "components": [1], "time": 30, "request_id": "a" })),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);

    // a different configuration may read but not write
    let mut other = config.clone();
    other.mc.seed += 1;
    let engine = Arc::new(Engine::open(other, Some(path.clone())).unwrap());
    assert!(engine.stale().is_some());
    let (status, state) = call(&engine, "GET", "/state", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(state["stale"].is_string());
    let (status, _) = call(
        &engine,
        "POST",
        "/maintenance",
        Some(json!({ "components": [1], "time": 30, "request_id": "c" })),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);

    // a history that no longer matches its recorded state is refused
    let mut tampered = PersistedState::load(&path).unwrap();
    tampered.state.s += 1;
    tampered.save(&path).unwrap();
    assert!(Engine::open(config, Some(path)).is_err());
}

#[test]
fn state_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var(STATE_DIR_ENV, dir.path());
    assert_eq!(resolve_state_path(None), Some(dir.path().join(STATE_FILE)));
    let explicit = dir.path().join("other.json");
    assert_eq!(resolve_state_path(Some(&explicit)), Some(explicit));
    std::env::remove_var(STATE_DIR_ENV);
    assert_eq!(resolve_state_path(None), None);
}
