use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

use crate::session::{ServiceError, SessionStore, SpecSource};
use crate::wire::{error_response, CreateRequest, ErrorJson, ReplyJson, ReplyRequest, SnapshotJson};

pub const DEFAULT_ADDR: &str = "127.0.0.1:8750";

type Shared = Arc<SessionStore>;

struct ApiError(StatusCode, ErrorJson);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let (code, body) = error_response(&e);
        ApiError(StatusCode::from_u16(code).expect("valid status"), body)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| {
        ApiError(StatusCode::BAD_REQUEST, ErrorJson::new("bad_request", format!("invalid JSON body: {e}")))
    })
}

async fn create(State(store): State<Shared>, bytes: Bytes) -> Result<(StatusCode, Json<ReplyJson>), ApiError> {
    let req: CreateRequest = body(&bytes)?;
    let source = match (req.spec, req.builtin) {
        (Some(text), None) => SpecSource::Text(text),
        (None, Some(name)) => SpecSource::Builtin(name),
        _ => return Err(ServiceError::BadRequest.into()),
    };
    let reply = store.create(source)?;
    Ok((StatusCode::CREATED, Json((&reply).into())))
}

async fn reply(State(store): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> Result<Json<ReplyJson>, ApiError> {
    let req: ReplyRequest = body(&bytes)?;
    let reply = store.advance(&id, &req.answer)?;
    Ok(Json((&reply).into()))
}

async fn snapshot(State(store): State<Shared>, Path(id): Path<String>) -> Result<Json<SnapshotJson>, ApiError> {
    Ok(Json((&store.get(&id)?).into()))
}

/// The API routes; with `static_dir`, files under it are served at `/`.
pub fn router(store: Shared, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/v1/sessions", post(create))
        .route("/api/v1/sessions/{id}/reply", post(reply))
        .route("/api/v1/sessions/{id}", get(snapshot))
        .with_state(store);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until the listener fails. Idle sessions are swept once a minute.
pub async fn serve(listener: TcpListener, store: Shared, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let sweeper = Arc::clone(&store);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.sweep();
        }
    });
    axum::serve(listener, router(store, static_dir)).await
}

pub async fn bind(addr: SocketAddr) -> std::io::Result<TcpListener> {
    TcpListener::bind(addr).await
}
