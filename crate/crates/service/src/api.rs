//! HTTP API for uploads, job polling, stored analyses and eval reports.
//!
//! Errors are JSON `{"error": <code>, "detail": <text>}` where `code` is a
//! stable machine-readable reason such as `TooLong` or `NotFound`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::extract::{DefaultBodyLimit, FromRequest, Multipart, Path as UrlPath, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::io::AsyncWriteExt;
use vidtriage_core::media::IngestError;
use vidtriage_core::pipeline::Pipeline;
use vidtriage_core::store::{check_id, Store};
use vidtriage_core::PipelineConfig;

use crate::jobs::{Jobs, SubmitError};

#[derive(Clone)]
pub struct AppState {
    pub pipeline: Arc<Pipeline>,
    pub store: Store,
    pub jobs: Jobs,
    pub max_upload_bytes: u64,
}

impl AppState {
    pub fn new(pipeline: Arc<Pipeline>, store: Store, config: &PipelineConfig) -> Self {
        let jobs = Jobs::start(pipeline.clone(), config.service.workers);
        Self { pipeline, store, jobs, max_upload_bytes: config.service.max_upload_bytes }
    }
}

pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    detail: String,
    extra: Option<(&'static str, String)>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, detail: impl Into<String>) -> Self {
        Self { status, code, detail: detail.into(), extra: None }
    }

    fn not_found(what: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NotFound", what)
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string())
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, e.reason(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.code, "detail": self.detail });
        if let Some((k, v)) = self.extra {
            body[k] = json!(v);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState, ui_dir: Option<&Path>) -> Router {
    // Let our own size check answer 413 with a JSON body; the transport
    // limit only stops runaway streams.
    let limit = usize::try_from(state.max_upload_bytes.saturating_add(1 << 20)).unwrap_or(usize::MAX);
    let api = Router::new()
        .route("/videos", post(post_video))
        .route("/jobs/{id}", get(get_job))
        .route("/videos/{id}/analysis", get(get_analysis))
        .route("/videos/{id}/factchecks", get(get_factchecks))
        .route("/eval/reports", get(list_reports))
        .route("/eval/reports/{id}", get(get_report))
        .route("/eval/reports/{id}/confusion", get(get_confusion))
        .route("/config", get(get_config))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state);
    match ui_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UrlBody {
    url: String,
}

/// Keep a short alphanumeric extension from an upload name, else `bin`.
fn upload_extension(name: Option<&str>) -> String {
    name.and_then(|n| Path::new(n).extension())
        .and_then(|e| e.to_str())
        .filter(|e| !e.is_empty() && e.len() <= 8 && e.chars().all(|c| c.is_ascii_alphanumeric()))
        .map(str::to_ascii_lowercase)
        .unwrap_or_else(|| "bin".into())
}

async fn save_uploads(state: &AppState, mut form: Multipart) -> ApiResult<(PathBuf, PathBuf)> {
    let dir = state.store.uploads_dir().join(uuid::Uuid::new_v4().simple().to_string());
    tokio::fs::create_dir_all(&dir).await.map_err(ApiError::internal)?;
    let mut video: Option<PathBuf> = None;
    let mut total: u64 = 0;
    let fail = |dir: &Path, e: ApiError| {
        let _ = std::fs::remove_dir_all(dir);
        e
    };
    loop {
        let field = match form.next_field().await {
            Ok(Some(field)) => field,
            Ok(None) => break,
            Err(e) => {
                let status = e.status();
                let code = if status == StatusCode::PAYLOAD_TOO_LARGE { "TooLarge" } else { "BadRequest" };
                return Err(fail(&dir, ApiError::new(status, code, e.body_text())));
            }
        };
        let path = match field.name() {
            Some("file") => dir.join(format!("upload.{}", upload_extension(field.file_name()))),
            Some("audio") => dir.join("upload.wav"),
            _ => continue,
        };
        if field.name() == Some("file") {
            video = Some(path.clone());
        }
        let mut out = tokio::fs::File::create(&path).await.map_err(ApiError::internal)?;
        let mut field = field;
        loop {
            let chunk = match field.chunk().await {
                Ok(Some(c)) => c,
                Ok(None) => break,
                Err(e) => {
                    let status = e.status();
                    let code = if status == StatusCode::PAYLOAD_TOO_LARGE { "TooLarge" } else { "BadRequest" };
                    return Err(fail(&dir, ApiError::new(status, code, e.body_text())));
                }
            };
            total += chunk.len() as u64;
            if total > state.max_upload_bytes {
                return Err(fail(
                    &dir,
                    ApiError::new(
                        StatusCode::PAYLOAD_TOO_LARGE,
                        "TooLarge",
                        format!("upload exceeds {} bytes", state.max_upload_bytes),
                    ),
                ));
            }
            out.write_all(&chunk).await.map_err(ApiError::internal)?;
        }
        out.flush().await.map_err(ApiError::internal)?;
    }
    match video {
        Some(v) => Ok((v, dir)),
        None => Err(fail(&dir, ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", "multipart field \"file\" is missing"))),
    }
}

async fn post_video(State(state): State<AppState>, req: Request) -> ApiResult<Response> {
    let is_multipart = req
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));
    let (source, cleanup) = if is_multipart {
        let form = Multipart::from_request(req, &state)
            .await
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", e.body_text()))?;
        let (video, dir) = save_uploads(&state, form).await?;
        (video.display().to_string(), Some(dir))
    } else {
        let Json(body) = Json::<UrlBody>::from_request(req, &state)
            .await
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", e.body_text()))?;
        (body.url, None)
    };

    let pipeline = state.pipeline.clone();
    let admitted = tokio::task::spawn_blocking(move || pipeline.admit(&source))
        .await
        .map_err(ApiError::internal)?;
    let media = match admitted {
        Ok((media, _info)) => media,
        Err(e) => {
            if let Some(dir) = &cleanup {
                let _ = tokio::fs::remove_dir_all(dir).await;
            }
            return Err(e.into());
        }
    };
    match state.jobs.submit(media, cleanup.clone()) {
        Ok(job) => Ok((
            StatusCode::ACCEPTED,
            Json(json!({ "video_id": job.video_id, "job_id": job.job_id })),
        )
            .into_response()),
        Err(e) => {
            if let Some(dir) = &cleanup {
                let _ = tokio::fs::remove_dir_all(dir).await;
            }
            Err(match e {
                SubmitError::Duplicate { job_id } => ApiError {
                    extra: Some(("job_id", job_id)),
                    ..ApiError::new(StatusCode::CONFLICT, "DuplicateJob", "this video is already being analyzed")
                },
                SubmitError::QueueFull => {
                    ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "QueueFull", "too many queued jobs")
                }
            })
        }
    }
}

async fn get_job(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<crate::jobs::JobInfo>> {
    state.jobs.get(&id).map(Json).ok_or_else(|| ApiError::not_found(format!("no job {id}")))
}

/// Stored bytes for `video_id`: the active config's record, else the most
/// recent record under any config.
fn analysis_bytes(state: &AppState, video_id: &str) -> ApiResult<Vec<u8>> {
    if check_id(video_id).is_err() {
        return Err(ApiError::not_found(format!("no analysis for {video_id}")));
    }
    let digest = state.pipeline.config_digest();
    if let Some(bytes) = state.store.get_analysis_bytes(video_id, digest).map_err(ApiError::internal)? {
        return Ok(bytes);
    }
    let digests = state.store.analysis_digests(video_id).map_err(ApiError::internal)?;
    if let Some(latest) = digests.last() {
        if let Some(bytes) = state.store.get_analysis_bytes(video_id, latest).map_err(ApiError::internal)? {
            return Ok(bytes);
        }
    }
    Err(ApiError::not_found(format!("no analysis for {video_id}")))
}

fn json_bytes(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], Body::from(bytes)).into_response()
}

async fn get_analysis(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    analysis_bytes(&state, &id).map(json_bytes)
}

async fn get_factchecks(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let bytes = analysis_bytes(&state, &id)?;
    let path = PathBuf::from(format!("analyses/{id}"));
    let record = Store::decode_analysis(&path, &bytes).map_err(ApiError::internal)?;
    Ok(Json(json!({
        "video_id": record.video_id,
        "config_digest": record.config_digest,
        "claim_results": record.signals.claim_results,
    }))
    .into_response())
}

async fn list_reports(State(state): State<AppState>) -> ApiResult<Response> {
    let ids = state.store.list_reports().map_err(ApiError::internal)?;
    let mut reports = Vec::new();
    for id in ids {
        if let Ok(Some(r)) = state.store.get_report(&id) {
            reports.push(json!({
                "id": id,
                "dataset": r.dataset,
                "config_digest": r.config_digest,
                "n": r.metrics.n,
                "skipped": r.skipped.len(),
            }));
        }
    }
    Ok(Json(json!({ "reports": reports })).into_response())
}

fn load_report(state: &AppState, id: &str) -> ApiResult<vidtriage_core::eval::EvalReport> {
    if check_id(id).is_err() {
        return Err(ApiError::not_found(format!("no report {id}")));
    }
    state
        .store
        .get_report(id)
        .map_err(ApiError::internal)?
        .ok_or_else(|| ApiError::not_found(format!("no report {id}")))
}

async fn get_report(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    Ok(Json(load_report(&state, &id)?).into_response())
}

async fn get_confusion(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let report = load_report(&state, &id)?;
    let c = report.metrics.confusion;
    // Cell membership lets a client list the records behind each cell.
    let mut cells: [Vec<&str>; 4] = Default::default();
    for p in &report.predictions {
        let slot = match (p.gold.is_checkworthy(), p.pred.is_checkworthy()) {
            (true, true) => 0,
            (false, true) => 1,
            (true, false) => 2,
            (false, false) => 3,
        };
        cells[slot].push(&p.video_id);
    }
    Ok(Json(json!({
        "id": id,
        "dataset": report.dataset,
        "positive": "Checkworthy",
        "tp": c.tp,
        "fp": c.fp,
        "fn": c.fn_,
        "tn": c.tn,
        "n": c.n(),
        "videos": { "tp": cells[0], "fp": cells[1], "fn": cells[2], "tn": cells[3] },
    }))
    .into_response())
}

async fn get_config(State(state): State<AppState>) -> Json<serde_json::Value> {
    let config = state.pipeline.config().redacted();
    Json(json!({
        "config_digest": state.pipeline.config_digest(),
        "config": config,
    }))
}
