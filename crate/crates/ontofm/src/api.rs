//! HTTP/JSON API.
//!
//! Handlers are stateless: each takes one snapshot of the ontology at the
//! start of the request and answers entirely from it. Graph navigation state
//! travels with the request.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ontofm_core::{FsMirror, SortKey, SortOrder};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use tower_http::services::ServeDir;
use tracing::{info, warn};

use crate::config::Config;
use crate::error::ApiError;
use crate::service::{self, GraphOp, GraphRequest, SearchRequest};
use crate::snapshot::SnapshotStore;

pub struct AppState {
    pub store: SnapshotStore,
    pub mirror: FsMirror,
    pub config: Config,
}

impl AppState {
    /// Validates the configuration and loads the initial snapshot.
    pub fn open(config: Config) -> Result<Self, ApiError> {
        config.validate()?;
        let (store, report) = SnapshotStore::open(&config.ontology_path)?;
        for w in &report.warnings {
            warn!("{w}");
        }
        let mirror = FsMirror::new(&config.root_dir)?;
        Ok(AppState {
            store,
            mirror,
            config,
        })
    }
}

type Shared = State<Arc<AppState>>;
type ApiResult = Result<Response, ApiError>;

fn ok<T: serde::Serialize>(body: T) -> ApiResult {
    Ok(Json(body).into_response())
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::parse(format!("invalid request body: {e}")))
}

fn parse_query<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    q.map(|Query(t)| t)
        .map_err(|e| ApiError::parse(format!("invalid query string: {}", e.body_text())))
}

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/api/ontology/stats", get(stats))
        .route("/api/suggest", get(suggest))
        .route("/api/search", post(search))
        .route("/api/graph/toggle", post(graph_toggle))
        .route("/api/graph/center", post(graph_center))
        .route("/api/graph/tree", post(graph_tree))
        .route("/api/graph/folders", get(graph_folders))
        .route("/api/folders", get(folders))
        .route("/api/files", get(files))
        .route("/api/reload", post(reload));
    let api = match &state.config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(placeholder_index)),
    };
    api.with_state(state)
}

async fn placeholder_index() -> Html<&'static str> {
    Html(
        "<!doctype html><title>ontofm</title><p>The web client is not installed. \
         Start the server with <code>--static-dir</code> pointing at its build output, \
         or use the JSON API under <code>/api/</code>.</p>",
    )
}

async fn stats(State(app): Shared) -> ApiResult {
    ok(service::stats(&app.store.current()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuggestParams {
    #[serde(default)]
    q: String,
    limit: Option<usize>,
}

async fn suggest(State(app): Shared, q: Result<Query<SuggestParams>, QueryRejection>) -> ApiResult {
    let params = parse_query(q)?;
    let o = app.store.current();
    let limit = params.limit.unwrap_or(app.config.suggest_limit);
    ok(service::suggest(&o, &params.q, limit)?)
}

async fn search(State(app): Shared, body: Bytes) -> ApiResult {
    let req: SearchRequest = parse_body(&body)?;
    let o = app.store.current();
    ok(service::search(&o, Some(&app.mirror), &req)?)
}

async fn graph(app: &AppState, op: GraphOp, body: &Bytes) -> ApiResult {
    let req: GraphRequest = parse_body(body)?;
    let o = app.store.current();
    ok(service::graph_op(&o, op, req, app.config.tree_depth_limit)?)
}

async fn graph_toggle(State(app): Shared, body: Bytes) -> ApiResult {
    graph(&app, GraphOp::Toggle, &body).await
}

async fn graph_center(State(app): Shared, body: Bytes) -> ApiResult {
    graph(&app, GraphOp::Center, &body).await
}

async fn graph_tree(State(app): Shared, body: Bytes) -> ApiResult {
    graph(&app, GraphOp::Tree, &body).await
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FoldersParam {
    #[serde(default)]
    folders: String,
}

async fn graph_folders(
    State(app): Shared,
    q: Result<Query<FoldersParam>, QueryRejection>,
) -> ApiResult {
    let params = parse_query(q)?;
    let o = app.store.current();
    ok(service::concepts_for_folders(
        &o,
        &service::split_folders(&params.folders),
    )?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathParam {
    path: Option<String>,
}

async fn folders(State(app): Shared, q: Result<Query<PathParam>, QueryRejection>) -> ApiResult {
    let params = parse_query(q)?;
    let o = app.store.current();
    ok(service::folder(&o, &app.mirror, params.path.as_deref())?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilesParams {
    #[serde(default)]
    folders: String,
    #[serde(default)]
    sort: SortKey,
    #[serde(default)]
    order: SortOrder,
}

async fn files(State(app): Shared, q: Result<Query<FilesParams>, QueryRejection>) -> ApiResult {
    let params = parse_query(q)?;
    let o = app.store.current();
    let selected = service::split_folders(&params.folders);
    ok(service::files(
        &o,
        &app.mirror,
        &selected,
        params.sort,
        params.order,
    )?)
}

async fn reload(State(app): Shared) -> ApiResult {
    match app.store.reload() {
        Ok(report) => {
            info!(
                "reloaded ontology: {} concepts, {} instances, {} relations",
                report.stats.concepts, report.stats.instances, report.stats.relations
            );
            ok(report)
        }
        Err(e) => {
            warn!("reload failed, keeping previous snapshot: {e}");
            Err(e)
        }
    }
}

/// Binds `addr` and serves until the process is interrupted.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
