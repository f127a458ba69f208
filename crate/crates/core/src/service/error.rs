use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Serialize;

use crate::deck::DeckError;
use crate::jargon::JargonError;
use crate::repository::RepoError;

/// Error body returned by every failing endpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApiError {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl ApiError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            details: None,
        }
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new("bad_request", message)
    }

    pub fn not_found() -> Self {
        Self::new("not_found", "no such route")
    }

    pub fn status(&self) -> StatusCode {
        match self.code {
            "not_found" | "unknown_presentation" | "unknown_section" | "unknown_slide"
            | "unknown_element" | "unknown_entry" | "unknown_lineage" | "unknown_version"
            | "unknown_asset" => StatusCode::NOT_FOUND,
            "revision_conflict" | "duplicate_id" | "no_lineage" => StatusCode::CONFLICT,
            "method_not_allowed" => StatusCode::METHOD_NOT_ALLOWED,
            "provider_error" => StatusCode::BAD_GATEWAY,
            "storage_failure" | "corrupt_store" | "internal" => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), axum::Json(&self)).into_response()
    }
}

impl From<DeckError> for ApiError {
    fn from(e: DeckError) -> Self {
        let code = match &e {
            DeckError::InvalidDuration => "invalid_duration",
            DeckError::InvalidAudience => "invalid_audience",
            DeckError::PositionOutOfRange { .. } => "position_out_of_range",
            DeckError::NotAPermutation => "not_a_permutation",
            DeckError::UnknownSlide(_) => "unknown_slide",
            DeckError::UnknownSection(_) => "unknown_section",
            DeckError::UnknownElement(_) => "unknown_element",
            DeckError::InvalidBounds => "invalid_bounds",
            DeckError::DuplicateId(_) => "duplicate_id",
            DeckError::MalformedDocument(_) => "malformed_document",
            DeckError::UnsupportedSchemaVersion(_) => "unsupported_schema_version",
        };
        Self::new(code, e.to_string())
    }
}

impl From<RepoError> for ApiError {
    fn from(e: RepoError) -> Self {
        let code = match &e {
            RepoError::Deck(d) => return d.clone().into(),
            RepoError::UnknownEntry(_) => "unknown_entry",
            RepoError::UnknownLineage(_) => "unknown_lineage",
            RepoError::UnknownVersion { .. } => "unknown_version",
            RepoError::GranularityMismatch { .. } => "granularity_mismatch",
            RepoError::InvalidDecision(_) => "invalid_decision",
            RepoError::EmptyQuery => "empty_query",
            RepoError::NoLineage => "no_lineage",
            RepoError::Storage(_) => "storage_failure",
            RepoError::CorruptStore(_) => "corrupt_store",
        };
        Self::new(code, e.to_string())
    }
}

impl From<JargonError> for ApiError {
    fn from(e: JargonError) -> Self {
        let code = match &e {
            JargonError::Provider(_) => "provider_error",
            JargonError::InvalidAudience => "invalid_audience",
            JargonError::EmptySlide => "empty_slide",
            JargonError::DuplicateLexiconTerm(_) | JargonError::InvalidLexicon(_) => "internal",
        };
        Self::new(code, e.to_string())
    }
}
