//! Typed client for the clustering service.

use prefclust_core::wire::{ClusterRequest, ClusterResponse, ErrorBody, HealthResponse};
use reqwest::StatusCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("request to {url} failed: {source}")]
    Transport { url: String, source: reqwest::Error },
    /// The service answered with its error envelope.
    #[error("{} ({status}): {}", .body.error.code, .body.error.message)]
    Api { status: u16, body: ErrorBody },
    #[error("unexpected response ({status}): {message}")]
    Decode { status: u16, message: String },
}

impl ClientError {
    pub fn status(&self) -> Option<u16> {
        match self {
            ClientError::Transport { .. } => None,
            ClientError::Api { status, .. } | ClientError::Decode { status, .. } => Some(*status),
        }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            ClientError::Api { body, .. } => body.error.field.as_deref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base_url: String,
    http: reqwest::Client,
}

impl Client {
    /// `base_url` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base_url: impl Into<String>) -> Self {
        Self::with_http(base_url, reqwest::Client::new())
    }

    pub fn with_http(base_url: impl Into<String>, http: reqwest::Client) -> Self {
        Self { base_url: base_url.into().trim_end_matches('/').to_string(), http }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub async fn health(&self) -> Result<HealthResponse, ClientError> {
        let url = format!("{}/api/health", self.base_url);
        let response = self.http.get(&url).send().await.map_err(|source| ClientError::Transport { url, source })?;
        decode(response).await
    }

    pub async fn cluster(&self, request: &ClusterRequest) -> Result<ClusterResponse, ClientError> {
        let url = format!("{}/api/cluster", self.base_url);
        let response =
            self.http.post(&url).json(request).send().await.map_err(|source| ClientError::Transport { url, source })?;
        decode(response).await
    }
}

async fn decode<T: serde::de::DeserializeOwned>(response: reqwest::Response) -> Result<T, ClientError> {
    let status = response.status();
    let bytes = response
        .bytes()
        .await
        .map_err(|e| ClientError::Decode { status: status.as_u16(), message: e.to_string() })?;
    if status != StatusCode::OK {
        return Err(match serde_json::from_slice::<ErrorBody>(&bytes) {
            Ok(body) => ClientError::Api { status: status.as_u16(), body },
            Err(_) => ClientError::Decode {
                status: status.as_u16(),
                message: String::from_utf8_lossy(&bytes).chars().take(200).collect(),
            },
        });
    }
    serde_json::from_slice(&bytes).map_err(|e| ClientError::Decode { status: status.as_u16(), message: e.to_string() })
}
