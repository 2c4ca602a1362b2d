//! HTTP routing. Handlers hand work to the blocking pool because model fits
//! and file syncs are CPU and disk bound.

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::api::{CreateSessionRequest, FeedbackRequest};
use crate::error::{ErrorCode, Result, ServiceError};
use crate::store::SessionStore;

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub addr: SocketAddr,
    /// `None` disables CORS headers; `"*"` allows any origin.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            data_dir: PathBuf::from("crashpbo-data"),
            addr: SocketAddr::from(([127, 0, 0, 1], 8080)),
            cors_origin: None,
        }
    }
}

impl ServiceConfig {
    /// Reads `CRASHPBO_DATA_DIR`, `CRASHPBO_ADDR` and `CRASHPBO_CORS_ORIGIN`.
    pub fn from_env() -> std::result::Result<Self, String> {
        let mut c = ServiceConfig::default();
        if let Ok(d) = std::env::var("CRASHPBO_DATA_DIR") {
            c.data_dir = PathBuf::from(d);
        }
        if let Ok(a) = std::env::var("CRASHPBO_ADDR") {
            c.addr = a.parse().map_err(|e| format!("CRASHPBO_ADDR={a}: {e}"))?;
        }
        if let Ok(o) = std::env::var("CRASHPBO_CORS_ORIGIN") {
            if !o.is_empty() {
                c.cors_origin = Some(o);
            }
        }
        Ok(c)
    }
}

fn cors_layer(origin: &str) -> std::result::Result<CorsLayer, String> {
    let allow = if origin == "*" {
        AllowOrigin::any()
    } else {
        let v = HeaderValue::from_str(origin).map_err(|e| format!("CORS origin {origin}: {e}"))?;
        AllowOrigin::exact(v)
    };
    Ok(CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]))
}

type Shared = Arc<SessionStore>;

async fn blocking<T, F>(f: F) -> Result<T>
where
    F: FnOnce() -> Result<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f).await.map_err(|e| ServiceError::new(ErrorCode::Internal, e.to_string()))?
}

fn body<T>(payload: std::result::Result<Json<T>, JsonRejection>) -> Result<T> {
    payload.map(|Json(v)| v).map_err(|e| ServiceError::invalid(e.body_text()))
}

async fn create(
    State(store): State<Shared>,
    payload: std::result::Result<Json<CreateSessionRequest>, JsonRejection>,
) -> Result<Response> {
    let req = body(payload)?;
    let view = blocking(move || store.create(req)).await?;
    tracing::info!(id = %view.id, "session created");
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn session(State(store): State<Shared>, Path(id): Path<String>) -> Result<Response> {
    Ok(Json(blocking(move || store.view(&id)).await?).into_response())
}

async fn duel(State(store): State<Shared>, Path(id): Path<String>) -> Result<Response> {
    Ok(Json(blocking(move || store.duel(&id)).await?).into_response())
}

async fn feedback(
    State(store): State<Shared>,
    Path(id): Path<String>,
    payload: std::result::Result<Json<FeedbackRequest>, JsonRejection>,
) -> Result<Response> {
    let req = body(payload)?;
    Ok(Json(blocking(move || store.submit(&id, req)).await?).into_response())
}

async fn history(State(store): State<Shared>, Path(id): Path<String>) -> Result<Response> {
    Ok(Json(blocking(move || store.history(&id)).await?).into_response())
}

async fn export(State(store): State<Shared>, Path(id): Path<String>) -> Result<Response> {
    let json = blocking(move || store.export(&id)).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], json).into_response())
}

async fn healthz() -> &'static str {
    "ok"
}

pub fn router(store: Arc<SessionStore>, cors_origin: Option<&str>) -> std::result::Result<Router, String> {
    let router = Router::new()
        .route("/v1/healthz", get(healthz))
        .route("/v1/sessions", post(create))
        .route("/v1/sessions/{id}", get(session))
        .route("/v1/sessions/{id}/duel", get(duel))
        .route("/v1/sessions/{id}/feedback", post(feedback))
        .route("/v1/sessions/{id}/history", get(history))
        .route("/v1/sessions/{id}/export", get(export))
        .with_state(store);
    Ok(match cors_origin {
        Some(o) => router.layer(cors_layer(o)?),
        None => router,
    })
}

/// Serves until `shutdown` resolves, then lets in-flight requests finish.
pub async fn serve(
    listener: TcpListener,
    store: Arc<SessionStore>,
    cors_origin: Option<&str>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let app = router(store, cors_origin).map_err(std::io::Error::other)?;
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}
