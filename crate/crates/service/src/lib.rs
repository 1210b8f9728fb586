//! HTTP/JSON front end for the clustering pipeline.
//!
//! Routes:
//! - `POST /api/cluster`: cluster a location query or an inline tree
//! - `GET /api/health`
//! - `GET /ui/*`: the browser bundle, if built
//!
//! Every request is independent; nothing is cached between requests.

mod assets;
mod error;

use std::future::Future;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Request, State};
use axum::http::{StatusCode, Uri};
use axum::middleware::{self, Next};
use axum::response::Response;
use axum::routing::{get, post};
use axum::{Json, Router};
use prefclust_core::config::{self, Config};
use prefclust_core::data_io::parse_tree_value;
use prefclust_core::provider::{
    fetch_tree, BackendKind, Credentials, FixtureProvider, HttpProvider, MapStyle, PoiProvider, ValidationError,
};
use prefclust_core::render::{geojson_value, legend};
use prefclust_core::wire::{ClusterRequest, ClusterResponse, HealthResponse, TreeSource};
use prefclust_core::{jjcluster, Haversine, PreferenceTree};
use serde_json::{json, Value};
use tokio::net::TcpListener;

pub use assets::relative_path;
pub use error::ApiError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone)]
pub struct AppState {
    pub provider: Arc<dyn PoiProvider>,
    pub webui_dir: PathBuf,
    /// Shown by the health check, e.g. when the live backend has no credentials.
    pub credential_warning: Option<String>,
}

impl AppState {
    pub fn new(provider: Arc<dyn PoiProvider>) -> Self {
        let defaults = Config::default();
        Self {
            provider,
            webui_dir: PathBuf::from(defaults.get(config::WEBUI_DIR).unwrap_or_default()),
            credential_warning: None,
        }
    }

    pub fn fixture(dir: impl Into<PathBuf>) -> Self {
        Self::new(Arc::new(FixtureProvider::new(dir)))
    }

    /// Builds the backend named by `provider.backend`. Live credentials come
    /// from the environment only.
    pub fn from_config(config: &Config) -> Result<Self, String> {
        let get = |k: &str| config.get(k).unwrap_or_default().to_string();
        let mut state = match get(config::PROVIDER_BACKEND).as_str() {
            "fixture" => Self::fixture(get(config::PROVIDER_FIXTURES)),
            "live" => {
                let credentials = Credentials::from_env()?;
                let warning = credentials.is_none().then(|| {
                    "no provider credentials configured; venue searches will fail".to_string()
                });
                if let Some(w) = &warning {
                    tracing::warn!("{w}");
                }
                let provider =
                    HttpProvider::new(get(config::PROVIDER_BASE_URL), get(config::PROVIDER_GEOCODER_URL), credentials);
                Self { credential_warning: warning, ..Self::new(Arc::new(provider)) }
            }
            other => return Err(format!("{}: expected \"live\" or \"fixture\", got {other:?}", config::PROVIDER_BACKEND)),
        };
        state.webui_dir = PathBuf::from(get(config::WEBUI_DIR));
        Ok(state)
    }

    pub fn backend(&self) -> BackendKind {
        self.provider.kind()
    }
}

/// Clusters `tree` and packages everything a client needs to draw it.
pub fn cluster_response(
    tree: &PreferenceTree,
    style: MapStyle,
    query_echo: Value,
) -> Result<ClusterResponse, ApiError> {
    let result = jjcluster(tree, &Haversine)?;
    let geojson = geojson_value(&result, tree)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    let legend = legend(tree, &result);
    let mut echo = query_echo;
    if let Some(obj) = echo.as_object_mut() {
        obj.insert("map_style".into(), json!(style));
    }
    Ok(ClusterResponse { result, geojson, legend, query_echo: echo })
}

async fn cluster(State(state): State<AppState>, body: Bytes) -> Result<Json<ClusterResponse>, ApiError> {
    let value: Value = serde_json::from_slice(&body)
        .map_err(|e| ApiError::from(ValidationError::new("body", format!("invalid JSON: {e}"))))?;
    let (source, style) = ClusterRequest::source_from_value(&value)?;
    let (tree, echo) = match source {
        TreeSource::Query(spec) => {
            let tree = fetch_tree(state.provider.as_ref(), &spec).await?;
            let echo = serde_json::to_value(&spec).expect("query specs serialize");
            (tree, echo)
        }
        TreeSource::Inline(doc) => {
            let parsed = parse_tree_value(&doc)
                .map_err(|e| ApiError::from(ValidationError::new("tree", e.to_string())))?;
            let echo = json!({
                "tree": { "classes": parsed.tree.len(), "nodes": parsed.tree.node_count() },
                "warnings": parsed.warnings,
            });
            (parsed.tree, echo)
        }
    };
    Ok(Json(cluster_response(&tree, style, echo)?))
}

async fn health(State(state): State<AppState>) -> Json<HealthResponse> {
    Json(HealthResponse {
        status: "ok".into(),
        version: VERSION.into(),
        backend: state.backend(),
        credential_warning: state.credential_warning.clone(),
    })
}

async fn ui(State(state): State<AppState>, uri: Uri) -> Result<Response, ApiError> {
    assets::serve(&state.webui_dir, &uri).await
}

async fn not_found(uri: Uri) -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no route for {}", uri.path()))
}

async fn log_request(request: Request, next: Next) -> Response {
    let method = request.method().clone();
    let path = request.uri().path().to_string();
    let started = Instant::now();
    let response = next.run(request).await;
    tracing::info!(
        "{method} {path} {} {:.1}ms",
        response.status().as_u16(),
        started.elapsed().as_secs_f64() * 1000.0
    );
    response
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/cluster", post(cluster))
        .route("/api/health", get(health))
        .route("/ui", get(ui))
        .route("/ui/", get(ui))
        .route("/ui/{*path}", get(ui))
        .fallback(not_found)
        .with_state(state)
        .layer(middleware::from_fn(log_request))
}

/// Serves until `shutdown` resolves, then lets in-flight requests finish.
pub async fn run(
    listener: TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!("listening on http://{addr} (backend: {})", state.backend());
    }
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

