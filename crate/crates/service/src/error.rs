use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;

use crate::api::{ErrorBody, ErrorResponse, API_SCHEMA};
use protopredict::gateway::GatewayError;
use protopredict::predictor::PredictError;
use protopredict::report::ReportError;

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub field: Option<String>,
}

impl ApiError {
    pub fn not_found(what: &str, id: &str) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            code: "not_found",
            message: format!("no {what} with id {id:?}"),
            field: None,
        }
    }

    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            code: "invalid_payload",
            message: message.into(),
            field: Some(field.into()),
        }
    }

    pub fn backend(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_GATEWAY,
            code: "backend_failure",
            message: message.into(),
            field: None,
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "internal",
            message: message.into(),
            field: None,
        }
    }
}

impl From<PredictError> for ApiError {
    fn from(e: PredictError) -> Self {
        match &e {
            _ if e.is_backend() => ApiError::backend(e.to_string()),
            PredictError::NoParseableSamples { .. } => ApiError::backend(e.to_string()),
            PredictError::Gateway(GatewayError::InvalidBrief(m)) => ApiError::invalid(brief_field(m), e.to_string()),
            PredictError::Gateway(GatewayError::MissingUnit) => ApiError::invalid("unit", e.to_string()),
            PredictError::Gateway(GatewayError::Image(_)) => ApiError::invalid("image", e.to_string()),
            PredictError::InvalidN => ApiError::invalid("n", e.to_string()),
            _ => ApiError::internal(e.to_string()),
        }
    }
}

impl From<ReportError> for ApiError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Predict(p) => p.into(),
            ReportError::Sources(m) => ApiError::invalid("sources", m),
            ReportError::InvalidN => ApiError::invalid("n", e.to_string()),
            ReportError::MissingCase { .. } | ReportError::Records { .. } => {
                ApiError::invalid("sources", e.to_string())
            }
            other => ApiError::internal(other.to_string()),
        }
    }
}

/// Field path of a brief validation message.
fn brief_field(message: &str) -> String {
    ["problem", "design_solution", "key_functions"]
        .into_iter()
        .find(|f| message.starts_with(f))
        .map_or_else(|| "brief".into(), |f| format!("brief.{f}"))
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorResponse {
            schema: API_SCHEMA.into(),
            error: ErrorBody {
                status: self.status.as_u16(),
                code: self.code.into(),
                message: self.message,
                field: self.field,
            },
        };
        (self.status, Json(body)).into_response()
    }
}
