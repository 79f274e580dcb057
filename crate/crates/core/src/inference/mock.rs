//! In-process HTTP stand-in for the model backends.
//!
//! Every backend is mounted at `/{backend}/v1/infer`. Replies come either
//! from recordings on disk, keyed by `(backend, request digest)` and stored at
//! `<dir>/<backend>/<digest>.json` as `{"status": .., "body": ..}`, or from a
//! script closure. A scripted server can record what it serves, which is how
//! the fixture recordings are produced.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::Router;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::transport::request_digest;
use crate::canonical;
use crate::config::PipelineConfig;

/// What the script sees of a request.
#[derive(Debug, Clone)]
pub struct MockRequest {
    pub backend: String,
    pub task: String,
    pub input: Value,
    /// 1-based count of requests this backend has received, this one included.
    pub call: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockReply {
    pub status: u16,
    pub body: Value,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub delay_ms: u64,
}

fn is_zero(v: &u64) -> bool {
    *v == 0
}

impl MockReply {
    pub fn ok(output: Value) -> Self {
        Self { status: 200, body: json!({ "output": output }), delay_ms: 0 }
    }

    pub fn status(status: u16) -> Self {
        Self { status, body: json!({ "error": format!("scripted status {status}") }), delay_ms: 0 }
    }

    pub fn delayed(mut self, delay_ms: u64) -> Self {
        self.delay_ms = delay_ms;
        self
    }
}

pub type Script = Arc<dyn Fn(&MockRequest) -> MockReply + Send + Sync>;

enum Responder {
    Replay(PathBuf),
    Scripted(Script),
}

struct Shared {
    responder: Responder,
    record_dir: Option<PathBuf>,
    calls: Mutex<BTreeMap<String, usize>>,
    down: Mutex<Vec<String>>,
    misses: AtomicUsize,
}

pub fn recording_path(dir: &Path, backend: &str, digest: &str) -> PathBuf {
    dir.join(backend).join(format!("{digest}.json"))
}

pub struct MockServer {
    addr: SocketAddr,
    shared: Arc<Shared>,
    task: tokio::task::JoinHandle<()>,
}

impl MockServer {
    /// Serve recordings from `dir`. Unknown requests get 404.
    pub async fn replay(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        Self::start(Responder::Replay(dir.into()), None).await
    }

    pub async fn scripted(
        script: impl Fn(&MockRequest) -> MockReply + Send + Sync + 'static,
    ) -> std::io::Result<Self> {
        Self::start(Responder::Scripted(Arc::new(script)), None).await
    }

    /// Scripted, and every reply is written to `dir` for later replay.
    pub async fn recording(
        script: impl Fn(&MockRequest) -> MockReply + Send + Sync + 'static,
        dir: impl Into<PathBuf>,
    ) -> std::io::Result<Self> {
        Self::start(Responder::Scripted(Arc::new(script)), Some(dir.into())).await
    }

    async fn start(responder: Responder, record_dir: Option<PathBuf>) -> std::io::Result<Self> {
        let shared = Arc::new(Shared {
            responder,
            record_dir,
            calls: Mutex::new(BTreeMap::new()),
            down: Mutex::new(Vec::new()),
            misses: AtomicUsize::new(0),
        });
        let app = Router::new()
            .route("/{backend}/v1/infer", post(handle))
            .with_state(shared.clone());
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
        let addr = listener.local_addr()?;
        let task = tokio::spawn(async move {
            let _ = axum::serve(listener, app).await;
        });
        Ok(Self { addr, shared, task })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self, backend: &str) -> String {
        format!("http://{}/{backend}", self.addr)
    }

    /// Point every endpoint of `config` (and the default backends) here.
    pub fn point_config(&self, config: &mut PipelineConfig) {
        config.fill_defaults();
        for (name, endpoint) in config.endpoints.iter_mut() {
            endpoint.url = self.url(name);
        }
    }

    pub fn calls(&self, backend: &str) -> usize {
        self.shared.calls.lock().unwrap().get(backend).copied().unwrap_or(0)
    }

    pub fn total_calls(&self) -> usize {
        self.shared.calls.lock().unwrap().values().sum()
    }

    /// Requests that had no recording.
    pub fn misses(&self) -> usize {
        self.shared.misses.load(Ordering::SeqCst)
    }

    /// Make `backend` answer 503 until switched back.
    pub fn set_down(&self, backend: &str, down: bool) {
        let mut list = self.shared.down.lock().unwrap();
        list.retain(|b| b != backend);
        if down {
            list.push(backend.to_string());
        }
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.task.abort();
    }
}

async fn handle(
    State(shared): State<Arc<Shared>>,
    UrlPath(backend): UrlPath<String>,
    body: Bytes,
) -> Response {
    let call = {
        let mut calls = shared.calls.lock().unwrap();
        let n = calls.entry(backend.clone()).or_insert(0);
        *n += 1;
        *n
    };
    if shared.down.lock().unwrap().contains(&backend) {
        return (StatusCode::SERVICE_UNAVAILABLE, "down").into_response();
    }
    let digest = request_digest(&body);
    let reply = match &shared.responder {
        Responder::Replay(dir) => match load_recording(&recording_path(dir, &backend, &digest)) {
            Some(reply) => reply,
            None => {
                shared.misses.fetch_add(1, Ordering::SeqCst);
                tracing::warn!(backend, digest, "no recording for request");
                MockReply {
                    status: 404,
                    body: json!({ "error": format!("no recording {backend}/{digest}") }),
                    delay_ms: 0,
                }
            }
        },
        Responder::Scripted(script) => {
            let request: Value = match serde_json::from_slice(&body) {
                Ok(v) => v,
                Err(e) => {
                    return (StatusCode::BAD_REQUEST, format!("bad JSON: {e}")).into_response()
                }
            };
            let task = request.get("task").and_then(Value::as_str).unwrap_or("").to_string();
            let input = request.get("input").cloned().unwrap_or(Value::Null);
            script(&MockRequest { backend: backend.clone(), task, input, call })
        }
    };
    if let Some(dir) = &shared.record_dir {
        if reply.status == 200 {
            if let Err(e) = save_recording(&recording_path(dir, &backend, &digest), &reply) {
                tracing::error!(error = %e, "cannot write recording");
            }
        }
    }
    if reply.delay_ms > 0 {
        tokio::time::sleep(Duration::from_millis(reply.delay_ms)).await;
    }
    let status = StatusCode::from_u16(reply.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (
        status,
        [(axum::http::header::CONTENT_TYPE, "application/json")],
        canonical::value_to_bytes(&reply.body),
    )
        .into_response()
}

fn load_recording(path: &Path) -> Option<MockReply> {
    let bytes = std::fs::read(path).ok()?;
    serde_json::from_slice(&bytes).ok()
}

fn save_recording(path: &Path, reply: &MockReply) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let stored = MockReply { delay_ms: 0, ..reply.clone() };
    let mut bytes = canonical::to_bytes(&stored).map_err(std::io::Error::other)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)
}
