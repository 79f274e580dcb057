//! Shared HTTP envelope for every model backend.
//!
//! Request: `POST {base_url}/v1/infer` with body `{"input": {...}, "task": "<task>"}`
//! encoded canonically. Success: `200 {"output": {...}}`. Anything else is an
//! error; 429, 5xx, timeouts and connection failures are retried.

use std::time::Duration;

use serde::Deserialize;
use serde_json::{json, Value};
use tokio::time::Instant;

use super::InferenceError;
use crate::canonical;
use crate::config::EndpointConfig;
use crate::model::content_digest;

const BACKOFF_BASE_MS: u64 = 50;
const BACKOFF_MAX_MS: u64 = 1_000;

/// Where and how to reach one backend.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendEndpoint {
    pub name: String,
    pub base_url: reqwest::Url,
    pub timeout_ms: u64,
    pub max_retries: u32,
    pub auth_token: Option<String>,
}

impl BackendEndpoint {
    pub fn new(name: &str, base_url: &str) -> Result<Self, InferenceError> {
        let base_url = reqwest::Url::parse(base_url).map_err(|e| InferenceError::BadEndpoint {
            backend: name.to_string(),
            reason: e.to_string(),
        })?;
        Ok(Self {
            name: name.to_string(),
            base_url,
            timeout_ms: EndpointConfig::default().timeout_ms,
            max_retries: EndpointConfig::default().max_retries,
            auth_token: None,
        })
    }

    pub fn from_config(name: &str, config: &EndpointConfig) -> Result<Self, InferenceError> {
        let mut endpoint = Self::new(name, &config.url)?;
        endpoint.timeout_ms = config.timeout_ms.max(1);
        endpoint.max_retries = config.max_retries;
        endpoint.auth_token = config.resolved_token();
        Ok(endpoint)
    }

    pub fn with_timeout_ms(mut self, timeout_ms: u64) -> Self {
        self.timeout_ms = timeout_ms.max(1);
        self
    }

    pub fn with_retries(mut self, max_retries: u32) -> Self {
        self.max_retries = max_retries;
        self
    }

    pub fn infer_url(&self) -> reqwest::Url {
        let mut url = self.base_url.clone();
        let path = format!("{}/v1/infer", url.path().trim_end_matches('/'));
        url.set_path(&path);
        url
    }

    /// Upper bound on attempts made by one call.
    pub fn max_attempts(&self) -> u32 {
        1 + self.max_retries
    }
}

/// Canonical request body for `task` with `input`.
pub fn request_body(task: &str, input: Value) -> Vec<u8> {
    canonical::value_to_bytes(&json!({ "task": task, "input": input }))
}

/// Key used by the fixture recordings.
pub fn request_digest(body: &[u8]) -> String {
    // Re-canonicalize so clients that format differently still match.
    match serde_json::from_slice::<Value>(body) {
        Ok(value) => content_digest(&canonical::value_to_bytes(&value)),
        Err(_) => content_digest(body),
    }
}

#[derive(Debug, Deserialize)]
struct ResponseEnvelope {
    output: Value,
}

fn is_transient(status: reqwest::StatusCode) -> bool {
    status == reqwest::StatusCode::TOO_MANY_REQUESTS || status.is_server_error()
}

fn backoff(attempt: u32) -> Duration {
    let ms = BACKOFF_BASE_MS.saturating_mul(1 << attempt.saturating_sub(1).min(16));
    Duration::from_millis(ms.min(BACKOFF_MAX_MS))
}

/// Stateless client for one backend. Cheap to clone.
#[derive(Debug, Clone)]
pub struct BackendClient {
    endpoint: BackendEndpoint,
    http: reqwest::Client,
}

impl BackendClient {
    pub fn new(endpoint: BackendEndpoint) -> Self {
        let mut builder = reqwest::Client::builder();
        let loopback = match endpoint.base_url.host_str() {
            Some("localhost") => true,
            Some(host) => host
                .trim_matches(['[', ']'])
                .parse::<std::net::IpAddr>()
                .is_ok_and(|ip| ip.is_loopback()),
            None => false,
        };
        if loopback {
            builder = builder.no_proxy();
        }
        let http = builder.build().expect("HTTP client with default TLS settings");
        Self { endpoint, http }
    }

    pub fn endpoint(&self) -> &BackendEndpoint {
        &self.endpoint
    }

    pub fn name(&self) -> &str {
        &self.endpoint.name
    }

    /// Send one request, retrying transient failures. Total wall time is
    /// bounded by `max_attempts() * timeout_ms`.
    pub async fn call(&self, task: &str, input: Value) -> Result<Value, InferenceError> {
        let body = request_body(task, input);
        let url = self.endpoint.infer_url();
        let per_attempt = Duration::from_millis(self.endpoint.timeout_ms);
        let attempts = self.endpoint.max_attempts();
        let deadline = Instant::now() + per_attempt * attempts;
        let mut last_error = String::from("no attempt made");
        let mut made = 0;

        for attempt in 1..=attempts {
            let remaining = deadline.saturating_duration_since(Instant::now());
            if remaining.is_zero() {
                break;
            }
            made = attempt;
            let mut request = self
                .http
                .post(url.clone())
                .timeout(per_attempt.min(remaining))
                .header(reqwest::header::CONTENT_TYPE, "application/json")
                .body(body.clone());
            if let Some(token) = &self.endpoint.auth_token {
                request = request.bearer_auth(token);
            }
            match request.send().await {
                Ok(response) if response.status().is_success() => {
                    let bytes = response.bytes().await.map_err(|e| self.bad_response(e))?;
                    let envelope: ResponseEnvelope =
                        serde_json::from_slice(&bytes).map_err(|e| self.bad_response(e))?;
                    return Ok(envelope.output);
                }
                Ok(response) if is_transient(response.status()) => {
                    last_error = format!("HTTP {}", response.status());
                }
                Ok(response) => {
                    return Err(InferenceError::BackendUnavailable {
                        backend: self.name().to_string(),
                        attempts: attempt,
                        reason: format!("HTTP {}", response.status()),
                    });
                }
                Err(e) => {
                    last_error = if e.is_timeout() { "timed out".to_string() } else { e.to_string() };
                }
            }
            tracing::debug!(backend = self.name(), attempt, error = %last_error, "backend attempt failed");
            if attempt < attempts {
                let remaining = deadline.saturating_duration_since(Instant::now());
                tokio::time::sleep(backoff(attempt).min(remaining)).await;
            }
        }
        Err(InferenceError::BackendUnavailable {
            backend: self.name().to_string(),
            attempts: made,
            reason: last_error,
        })
    }

    fn bad_response(&self, e: impl std::fmt::Display) -> InferenceError {
        InferenceError::BadResponse { backend: self.name().to_string(), reason: e.to_string() }
    }
}
