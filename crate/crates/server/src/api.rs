//! HTTP routes. Every response body is JSON.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use provenance_core::companion::{present, UserPatch};
use provenance_core::ingestion::{asset_id_for_url, IngestError, RawFeedItem};
use provenance_core::platform::Platform;
use provenance_core::query::{CannedQuery, QueryError};
use provenance_core::workflow::AnalyzerInput;
use provenance_core::{Digest, Source};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::cors::{Any, CorsLayer};

pub const JSON_UTF8: &str = "application/json; charset=utf-8";

pub type AppState = Arc<Platform>;

pub fn router(platform: AppState) -> Router {
    let cors = cors_layer(&platform.config.server.cors_origin);
    Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/assets", post(register_asset))
        .route("/api/v1/assets/{asset_id}/status", get(asset_status))
        .route("/api/v1/verification", get(verification))
        .route("/api/v1/query/{name}", get(canned))
        .route("/api/v1/raw", post(raw))
        .route("/api/v1/presentation", get(presentation))
        .route("/api/v1/users/{id}", get(get_user).patch(patch_user))
        .route("/api/v1/analyzers", get(list_analyzers))
        .route("/api/v1/analyzers/{name}", post(run_analyzer))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "no such endpoint") })
        .layer(cors)
        .with_state(platform)
}

fn cors_layer(origin: &str) -> CorsLayer {
    let layer = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST, Method::PATCH, Method::OPTIONS])
        .allow_headers([header::CONTENT_TYPE]);
    match HeaderValue::from_str(origin) {
        Ok(v) if origin != "*" => layer.allow_origin(v),
        _ => layer.allow_origin(Any),
    }
}

fn json_response(status: StatusCode, body: &impl serde::Serialize) -> Response {
    let bytes = serde_json::to_vec(body).expect("response serializes");
    (status, [(header::CONTENT_TYPE, HeaderValue::from_static(JSON_UTF8))], bytes).into_response()
}

fn ok(body: &impl serde::Serialize) -> Response {
    json_response(StatusCode::OK, body)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status, &json!({ "error": self.message }))
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        let status = StatusCode::from_u16(e.http_status()).unwrap_or(StatusCode::BAD_REQUEST);
        ApiError::new(status, e.to_string())
    }
}

type ApiResult = Result<Response, ApiError>;

fn parse_json<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(e.to_string()))
}

async fn health() -> Response {
    ok(&json!({ "status": "ok" }))
}

async fn register_asset(State(p): State<AppState>, body: Bytes) -> ApiResult {
    let item: RawFeedItem = parse_json(&body)?;
    let reg = blocking(move || p.ingestor.register(&item, Source::TrustedAnalyst)).await?;
    match reg {
        Ok(r) if r.created => Ok(json_response(StatusCode::CREATED, &r.asset)),
        Ok(r) => Ok(ok(&r.asset)),
        Err(e @ (IngestError::InvalidUrl { .. } | IngestError::Validation(_))) => {
            Err(ApiError::bad_request(e.to_string()))
        }
        Err(e) => Err(ApiError::internal(e.to_string())),
    }
}

async fn asset_status(State(p): State<AppState>, Path(asset_id): Path<String>) -> ApiResult {
    let id: Digest = asset_id
        .parse()
        .map_err(|e: provenance_core::digest::DigestParseError| ApiError::bad_request(e.to_string()))?;
    Ok(ok(&json!({ "asset_id": id, "status": p.workflow.status(&id) })))
}

#[derive(Deserialize)]
struct UrlParam {
    url: Option<String>,
}

fn required_url(q: UrlParam) -> Result<String, ApiError> {
    q.url.ok_or_else(|| ApiError::bad_request("missing query parameter `url`"))
}

async fn verification(State(p): State<AppState>, Query(q): Query<UrlParam>) -> ApiResult {
    Ok(ok(&p.query.handle_verification(&required_url(q)?)?))
}

async fn canned(
    State(p): State<AppState>,
    Path(name): Path<String>,
    Query(params): Query<BTreeMap<String, String>>,
) -> ApiResult {
    let query = CannedQuery::parse(&name, params)?;
    Ok(ok(&p.query.handle_canned(&query)?))
}

async fn raw(State(p): State<AppState>, body: Bytes) -> ApiResult {
    Ok(ok(&p.query.handle_raw_json(&body)?))
}

#[derive(Deserialize)]
struct PresentationParams {
    url: Option<String>,
    user: Option<String>,
}

async fn presentation(State(p): State<AppState>, Query(q): Query<PresentationParams>) -> ApiResult {
    let url = required_url(UrlParam { url: q.url })?;
    let id = asset_id_for_url(&url).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let user = p.users.get(q.user.as_deref().unwrap_or("anonymous"));
    let record = p.graph.get_verification(&id);
    let pres =
        present(record.as_ref(), &user, &p.resources.templates).map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok(ok(&json!({ "url": url, "asset_id": id, "user_id": user.user_id, "presentation": pres })))
}

async fn get_user(State(p): State<AppState>, Path(id): Path<String>) -> ApiResult {
    Ok(ok(&p.users.get(&id)))
}

async fn patch_user(State(p): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let patch = UserPatch::from_json(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let updated = blocking(move || p.users.update(&id, &patch)).await?;
    match updated {
        Ok(u) => Ok(ok(&u)),
        Err(provenance_core::companion::CompanionError::Io(e)) => Err(ApiError::internal(e.to_string())),
        Err(e) => Err(ApiError::bad_request(e.to_string())),
    }
}

async fn list_analyzers(State(p): State<AppState>) -> Response {
    let list: Vec<Value> =
        p.local_analyzers.iter().map(|a| json!({ "name": a.name(), "criteria": a.criteria() })).collect();
    ok(&json!({ "analyzers": list }))
}

/// In-process analyzers exposed for http dispatch.
async fn run_analyzer(State(p): State<AppState>, Path(name): Path<String>, body: Bytes) -> ApiResult {
    let input: AnalyzerInput = parse_json(&body)?;
    if p.local_analyzer(&name).is_none() {
        return Err(ApiError::new(StatusCode::NOT_FOUND, format!("no analyzer `{name}`")));
    }
    let outcome = blocking(move || p.local_analyzer(&name).expect("checked above").analyze(&input)).await?;
    match outcome {
        Ok(results) => Ok(ok(&json!({ "results": results }))),
        Err(e) => Err(ApiError::internal(e.to_string())),
    }
}
