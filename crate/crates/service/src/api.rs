//! HTTP+JSON routes.
//!
//! | route             | body                                  |
//! |-------------------|---------------------------------------|
//! | `GET /state`      |                                       |
//! | `GET /plan`       |                                       |
//! | `GET /history`    |                                       |
//! | `POST /failure`   | `{component, time, request_id}`       |
//! | `POST /maintenance` | `{components, time, request_id}`    |
//! | `POST /whatif`    | `{calendar?, lambda?}`                |
//!
//! Every response carries `seed`, `mc` and `config_hash` next to its
//! payload. Errors are `{"error": message}` with 422 for requests the loop
//! cannot accept, 404 for unknown components and 409 for replayed request
//! ids or a state saved under another configuration.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use nextpm::{McSettings, SystemState};
use serde::Serialize;
use serde_json::json;

use crate::engine::{Engine, FailureRequest, MaintenanceRequest, WhatIfRequest};
use crate::error::ServiceError;
use crate::store::{HistoryEntry, PlanView};

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/state", get(get_state))
        .route("/plan", get(get_plan))
        .route("/history", get(get_history))
        .route("/failure", post(post_failure))
        .route("/maintenance", post(post_maintenance))
        .route("/whatif", post(post_whatif))
        .with_state(engine)
}

/// Binds `port` on all interfaces and serves until Ctrl-C.
pub async fn serve(engine: Arc<Engine>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(engine))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[derive(Serialize)]
struct Envelope<T> {
    seed: u64,
    mc: McSettings,
    config_hash: String,
    #[serde(flatten)]
    body: T,
}

fn wrap<T: Serialize>(engine: &Engine, body: T) -> Response {
    Json(Envelope {
        seed: engine.settings().seed,
        mc: engine.settings(),
        config_hash: engine.config_hash().to_string(),
        body,
    })
    .into_response()
}

struct ApiError(StatusCode, String);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let status = match &e {
            ServiceError::Validation(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Model(nextpm::Error::Domain(_) | nextpm::Error::InvalidConfig(_)) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(e.status(), e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

type Reply = Result<Response, ApiError>;

/// Runs `f` on the blocking pool; plan builds take about a second.
async fn blocking<T, F>(engine: &Arc<Engine>, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&Engine) -> crate::error::Result<T> + Send + 'static,
{
    let engine = engine.clone();
    tokio::task::spawn_blocking(move || f(&engine))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(ApiError::from)
}

#[derive(Serialize)]
struct StateBody {
    state: SystemState,
    component_ids: Vec<u32>,
    ages: Vec<u32>,
    events: usize,
    stale: Option<String>,
}

async fn get_state(State(engine): State<Arc<Engine>>) -> Reply {
    let snap = engine.snapshot();
    let body = StateBody {
        ages: snap.state.ages(),
        state: snap.state.clone(),
        component_ids: engine.config().components.iter().map(|c| c.id).collect(),
        events: snap.history.len(),
        stale: engine.stale().map(str::to_string),
    };
    Ok(wrap(&engine, body))
}

#[derive(Serialize)]
struct PlanBody {
    plan: Option<PlanView>,
}

async fn get_plan(State(engine): State<Arc<Engine>>) -> Reply {
    let plan = blocking(&engine, |e| e.plan()).await?;
    Ok(wrap(&engine, PlanBody { plan }))
}

#[derive(Serialize)]
struct HistoryBody {
    events: Vec<HistoryEntry>,
}

async fn get_history(State(engine): State<Arc<Engine>>) -> Reply {
    let events = engine.snapshot().history.clone();
    Ok(wrap(&engine, HistoryBody { events }))
}

async fn post_failure(
    State(engine): State<Arc<Engine>>,
    body: Result<Json<FailureRequest>, JsonRejection>,
) -> Reply {
    let Json(req) = body?;
    let out = blocking(&engine, move |e| e.report_failure(&req)).await?;
    Ok(wrap(&engine, out))
}

async fn post_maintenance(
    State(engine): State<Arc<Engine>>,
    body: Result<Json<MaintenanceRequest>, JsonRejection>,
) -> Reply {
    let Json(req) = body?;
    let out = blocking(&engine, move |e| e.record_maintenance(&req)).await?;
    Ok(wrap(&engine, out))
}

async fn post_whatif(
    State(engine): State<Arc<Engine>>,
    body: Result<Json<WhatIfRequest>, JsonRejection>,
) -> Reply {
    let Json(req) = body?;
    let out = blocking(&engine, move |e| e.whatif(&req)).await?;
    Ok(wrap(&engine, out))
}
