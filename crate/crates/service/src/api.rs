//! Request and response bodies.

use serde::{Deserialize, Serialize};

use protopredict::corpus::DesignCase;
use protopredict::gateway::{DesignBrief, Task};
use protopredict::predictor::{AggregatedPrediction, ImprovementRange};
use protopredict::report::{BenchmarkReport, SourceSpec, Summary};

pub const API_SCHEMA: &str = "protopredict/api-v1";

/// JSON Schema describing every response body.
pub const API_JSON_SCHEMA: &str = include_str!("../schema/api-v1.schema.json");

pub const MAX_N: usize = 200;

fn api_schema() -> String {
    API_SCHEMA.into()
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub sha256: String,
    pub media_type: String,
    pub size_bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnResult {
    pub seed: u64,
    pub prediction: AggregatedPrediction,
    /// Improvement ranges found in refine answers, one per sample that has one.
    pub improvements: Vec<ImprovementRange>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub index: usize,
    pub role: Role,
    pub content: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(default)]
    pub attachments: Vec<Attachment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<TurnResult>,
    pub created_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub brief: DesignBrief,
    pub history: Vec<Turn>,
    pub created_at: String,
    pub updated_at: String,
}

impl Session {
    /// The brief with every user message appended as a note.
    pub fn accumulated_brief(&self) -> DesignBrief {
        let mut b = self.brief.clone();
        for t in self.history.iter().filter(|t| t.role == Role::User) {
            b.notes.push(t.content.clone());
        }
        b
    }

    /// The most recent image attached to a user turn.
    pub fn latest_attachment(&self) -> Option<&Attachment> {
        self.history.iter().rev().flat_map(|t| t.attachments.iter()).next()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSessionRequest {
    #[serde(default = "api_schema")]
    pub schema: String,
    pub brief: DesignBrief,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurnRequest {
    #[serde(default = "api_schema")]
    pub schema: String,
    pub message: String,
    pub task: Task,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub unit: Option<String>,
    /// Base64 image bytes or a `data:` URL.
    #[serde(default)]
    pub image: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictRequest {
    #[serde(default = "api_schema")]
    pub schema: String,
    pub brief: DesignBrief,
    pub task: Task,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub unit: Option<String>,
    #[serde(default = "yes")]
    pub retrieval: bool,
    #[serde(default)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchRequest {
    #[serde(default = "api_schema")]
    pub schema: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the demo sources; recorded paths resolve in the data directory.
    #[serde(default)]
    pub sources: Option<Vec<SourceSpec>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionResponse {
    pub schema: String,
    pub session: Session,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TurnResponse {
    pub schema: String,
    pub session_id: String,
    pub turns: Vec<Turn>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictResponse {
    pub schema: String,
    pub prediction: AggregatedPrediction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CasesResponse {
    pub schema: String,
    pub cases: Vec<DesignCase>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchResponse {
    pub schema: String,
    pub run_id: String,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportResponse {
    pub schema: String,
    pub report: BenchmarkReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HealthResponse {
    pub schema: String,
    pub status: String,
    pub version: String,
    pub backend: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub status: u16,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub schema: String,
    pub error: ErrorBody,
}
