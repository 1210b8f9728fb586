use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use prefclust_core::provider::{FetchError, ProviderError, ValidationError};
use prefclust_core::wire::{ErrorBody, ErrorDetail};
use prefclust_core::EngineError;

/// An error response: status plus the `{error: {code, message, field?}}` body.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub field: Option<String>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into(), field: None }
    }

    pub fn with_field(mut self, field: impl Into<String>) -> Self {
        self.field = Some(field.into());
        self
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            error: ErrorDetail { code: self.code.to_string(), message: self.message.clone(), field: self.field.clone() },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body())).into_response()
    }
}

impl From<ValidationError> for ApiError {
    fn from(e: ValidationError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "validation", e.message).with_field(e.field)
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "empty_tree", e.to_string())
    }
}

fn provider(e: &ProviderError, context: String) -> ApiError {
    match e {
        ProviderError::InvalidInput(_) => ApiError::new(StatusCode::BAD_REQUEST, "validation", context),
        ProviderError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "not_found", context),
        ProviderError::Unavailable(_) => ApiError::new(StatusCode::BAD_GATEWAY, "provider_unavailable", context),
        ProviderError::RateLimited { .. } => ApiError::new(StatusCode::BAD_GATEWAY, "provider_rate_limited", context),
    }
}

impl From<FetchError> for ApiError {
    fn from(e: FetchError) -> Self {
        match &e {
            FetchError::Invalid(v) => v.clone().into(),
            FetchError::Geocode(p) => provider(p, e.to_string()).with_field("location"),
            FetchError::Class { source, .. } => provider(source, e.to_string()),
        }
    }
}
