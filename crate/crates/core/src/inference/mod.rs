//! Clients for the remote model backends.
//!
//! Every backend speaks the envelope in [`transport`]. The per-task input and
//! output shapes are documented on each client function and in
//! `docs/backends.md`. [`mock`] serves recorded or scripted replies so the
//! pipeline runs offline.

mod clients;
pub mod mock;
pub mod prompt;
pub mod transport;
pub mod verdict;

use std::collections::BTreeMap;

pub use clients::*;
pub use prompt::{PromptError, PromptTemplate};
pub use transport::{BackendClient, BackendEndpoint};

use crate::config::PipelineConfig;

#[derive(Debug, thiserror::Error)]
pub enum InferenceError {
    #[error("backend {backend} unavailable after {attempts} attempt(s): {reason}")]
    BackendUnavailable { backend: String, attempts: u32, reason: String },
    #[error("backend {backend} sent a malformed reply: {reason}")]
    BadResponse { backend: String, reason: String },
    #[error("backend {backend} has an invalid endpoint: {reason}")]
    BadEndpoint { backend: String, reason: String },
    #[error("bad audio: {0}")]
    BadAudio(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

impl InferenceError {
    pub fn backend(&self) -> Option<&str> {
        match self {
            InferenceError::BackendUnavailable { backend, .. }
            | InferenceError::BadResponse { backend, .. }
            | InferenceError::BadEndpoint { backend, .. } => Some(backend),
            _ => None,
        }
    }
}

/// One client per configured endpoint, by backend name.
#[derive(Debug, Clone, Default)]
pub struct Backends {
    clients: BTreeMap<String, BackendClient>,
}

impl Backends {
    pub fn from_config(config: &PipelineConfig) -> Result<Self, InferenceError> {
        let mut clients = BTreeMap::new();
        for (name, endpoint) in &config.endpoints {
            let endpoint = BackendEndpoint::from_config(name, endpoint)?;
            clients.insert(name.clone(), BackendClient::new(endpoint));
        }
        Ok(Self { clients })
    }

    pub fn insert(&mut self, client: BackendClient) {
        self.clients.insert(client.name().to_string(), client);
    }

    pub fn get(&self, name: &str) -> Result<&BackendClient, InferenceError> {
        self.clients.get(name).ok_or_else(|| InferenceError::BadEndpoint {
            backend: name.to_string(),
            reason: "no endpoint configured".into(),
        })
    }
}
