//! HTTP front end for a single analysis session.
//!
//! Reads take a shared lock and see one revision; mutations take the write
//! lock, so accepted revisions form a total order. Mutating requests carry
//! the revision the client last saw and are rejected with 409 when it is
//! stale.

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use vsplit_core::data::{parse_clinical, parse_expression, zscore_normalize, ClinicalTable};
use vsplit_core::{
    DataError, DatasetSummary, LineSpec, LoadOptions, ModelDocument, ModelError, NodeId, Orientation, Session,
    SessionError, SessionOptions,
};

/// Parses the uploaded texts exactly as the CLI does and opens a session.
pub fn prepare_dataset(
    expression: &str,
    clinical: Option<&str>,
    load: LoadOptions,
    zscore: bool,
    options: SessionOptions,
) -> Result<(Session, DatasetSummary), DataError> {
    let mut matrix = parse_expression::<f64>(expression, load)?;
    let mut degenerate = Vec::new();
    if zscore {
        let n = zscore_normalize(&matrix);
        matrix = n.matrix;
        degenerate = n.degenerate;
    }
    let clinical = match clinical {
        Some(text) => parse_clinical(text, &matrix)?,
        None => ClinicalTable::empty(matrix.n_samples()),
    };
    let summary = DatasetSummary::describe(&matrix, &clinical, zscore, &degenerate);
    let session = Session::new(matrix, clinical, options).map_err(|_| DataError::EmptyFile)?;
    Ok((session, summary))
}

#[derive(Clone, Default)]
pub struct AppState {
    session: Arc<RwLock<Option<Session>>>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_session(session: Session) -> Self {
        Self {
            session: Arc::new(RwLock::new(Some(session))),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/dataset", post(upload_dataset))
        .route("/tree", get(tree))
        .route("/heatmap", get(heatmap))
        .route("/survival", get(survival))
        .route("/overlay", get(overlay))
        .route("/nodes/{id}/projection", get(projection))
        .route("/nodes/{id}/split", post(split))
        .route("/nodes/{id}/children", delete(prune))
        .route("/classify", post(classify))
        .route("/model/export", get(export))
        .route("/model/import", post(import))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    name: String,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, name: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            name: name.to_owned(),
            message: message.into(),
        }
    }

    fn no_session() -> Self {
        Self::new(StatusCode::CONFLICT, "NoSession", "no dataset loaded")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.name, "message": self.message }))).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            _ if e.is_unknown_node() => StatusCode::NOT_FOUND,
            SessionError::StaleRevision { .. } => StatusCode::CONFLICT,
            SessionError::Model(ModelError::Json(_)) => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self::new(status, e.name(), e.to_string())
    }
}

impl From<DataError> for ApiError {
    fn from(e: DataError) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, e.name(), e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "MalformedPayload", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "MalformedPayload", e.body_text())
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn read<R>(state: &AppState, f: impl FnOnce(&Session) -> ApiResult<R>) -> ApiResult<R> {
    let guard = state.session.read().expect("session lock");
    f(guard.as_ref().ok_or_else(ApiError::no_session)?)
}

fn write<R>(state: &AppState, f: impl FnOnce(&mut Session) -> ApiResult<R>) -> ApiResult<R> {
    let mut guard = state.session.write().expect("session lock");
    f(guard.as_mut().ok_or_else(ApiError::no_session)?)
}

#[derive(Deserialize)]
struct DatasetUpload {
    expression: String,
    #[serde(default)]
    clinical: Option<String>,
    #[serde(default)]
    orientation: Orientation,
    #[serde(default)]
    zscore: bool,
    #[serde(default)]
    impute_mean: bool,
    #[serde(default)]
    bins: Option<usize>,
    #[serde(default)]
    cmax: Option<f64>,
}

async fn upload_dataset(
    State(state): State<AppState>,
    body: Result<Json<DatasetUpload>, JsonRejection>,
) -> ApiResult<Json<DatasetSummary>> {
    let Json(up) = body?;
    let defaults = SessionOptions::default();
    let options = SessionOptions {
        bins: up.bins.unwrap_or(defaults.bins),
        cmax: up.cmax.unwrap_or(defaults.cmax),
    };
    let load = LoadOptions {
        orientation: up.orientation,
        impute_mean: up.impute_mean,
    };
    let (session, summary) = prepare_dataset(&up.expression, up.clinical.as_deref(), load, up.zscore, options)?;
    *state.session.write().expect("session lock") = Some(session);
    Ok(Json(summary))
}

#[derive(Serialize)]
struct WithRevision<T> {
    revision: u64,
    #[serde(flatten)]
    body: T,
}

async fn tree(State(state): State<AppState>) -> ApiResult<Response> {
    read(&state, |s| {
        Ok(Json(WithRevision {
            revision: s.revision(),
            body: s.hierarchy(),
        })
        .into_response())
    })
}

async fn heatmap(State(state): State<AppState>) -> ApiResult<Response> {
    read(&state, |s| {
        Ok(Json(WithRevision {
            revision: s.revision(),
            body: s.heatmap(),
        })
        .into_response())
    })
}

async fn survival(State(state): State<AppState>) -> ApiResult<Response> {
    read(&state, |s| {
        Ok(Json(WithRevision {
            revision: s.revision(),
            body: s.survival()?,
        })
        .into_response())
    })
}

async fn overlay(State(state): State<AppState>) -> ApiResult<Response> {
    read(&state, |s| {
        Ok(Json(WithRevision {
            revision: s.revision(),
            body: s.overlay()?,
        })
        .into_response())
    })
}

#[derive(Deserialize)]
struct ProjectionQuery {
    #[serde(default)]
    pcx: usize,
    #[serde(default = "one")]
    pcy: usize,
    /// Comma-separated feature names; absent or empty means all.
    #[serde(default)]
    features: Option<String>,
}

fn one() -> usize {
    1
}

fn split_names(list: Option<&str>) -> Vec<String> {
    list.map(|s| {
        s.split(',')
            .map(str::trim)
            .filter(|n| !n.is_empty())
            .map(str::to_owned)
            .collect()
    })
    .unwrap_or_default()
}

async fn projection(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<ProjectionQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(q) = query?;
    read(&state, |s| {
        let node = s.node_id(&id)?;
        let view = s.projection_view(node, q.pcx, q.pcy, &split_names(q.features.as_deref()))?;
        Ok(Json(WithRevision {
            revision: s.revision(),
            body: view,
        })
        .into_response())
    })
}

#[derive(Deserialize)]
struct SplitRequest {
    pcx: usize,
    pcy: usize,
    #[serde(default)]
    features: Vec<String>,
    line: LineSpec,
    revision: u64,
}

async fn split(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<SplitRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    write(&state, |s| {
        s.check_revision(req.revision)?;
        let node = s.node_id(&id)?;
        Ok(Json(s.split(node, req.pcx, req.pcy, &req.features, req.line)?).into_response())
    })
}

#[derive(Deserialize)]
struct PruneRequest {
    revision: u64,
}

async fn prune(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<PruneRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    write(&state, |s| {
        s.check_revision(req.revision)?;
        let node = s.node_id(&id)?;
        Ok(Json(s.prune(node)?).into_response())
    })
}

#[derive(Deserialize)]
struct ClassifyRequest {
    /// Column names of `rows`; defaults to the dataset's features.
    #[serde(default)]
    features: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct ClassifyResponse {
    revision: u64,
    leaves: Vec<NodeId>,
}

async fn classify(
    State(state): State<AppState>,
    body: Result<Json<ClassifyRequest>, JsonRejection>,
) -> ApiResult<Json<ClassifyResponse>> {
    let Json(req) = body?;
    read(&state, |s| {
        let names = req.features.unwrap_or_else(|| s.matrix().feature_names().to_vec());
        Ok(Json(ClassifyResponse {
            revision: s.revision(),
            leaves: s.classify_rows(&names, &req.rows)?,
        }))
    })
}

/// The body is the canonical document text, byte-identical to what the CLI
/// writes.
async fn export(State(state): State<AppState>) -> ApiResult<Response> {
    read(&state, |s| {
        Ok(([(header::CONTENT_TYPE, "application/json")], s.export().to_json()).into_response())
    })
}

async fn import(State(state): State<AppState>, body: String) -> ApiResult<Json<serde_json::Value>> {
    let doc = ModelDocument::from_json(&body).map_err(|e| ApiError::from(SessionError::from(e)))?;
    write(&state, |s| Ok(Json(json!({ "revision": s.import(&doc)? }))))
}
