use protopredict::corpus::CorpusError;
use protopredict::gateway::GatewayError;
use protopredict::predictor::PredictError;
use protopredict::report::ReportError;
use protopredict::retrieval::RetrievalError;
use protopredict::usability::UsabilityError;

/// Failure classes and their exit codes: usage 1, data 2, backend 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Backend(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Backend(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Backend(_) => "backend",
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string().trim_end(),
            }
        })
        .to_string()
    }

    pub fn data(context: impl std::fmt::Display, e: impl std::fmt::Display) -> Self {
        CliError::Data(format!("{context}: {e}"))
    }
}

impl From<PredictError> for CliError {
    fn from(e: PredictError) -> Self {
        match e {
            _ if e.is_backend() => CliError::Backend(e.to_string()),
            PredictError::NoParseableSamples { .. } => CliError::Backend(e.to_string()),
            PredictError::Gateway(GatewayError::MissingUnit) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Predict(p) => p.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<GatewayError> for CliError {
    fn from(e: GatewayError) -> Self {
        PredictError::from(e).into()
    }
}

impl From<RetrievalError> for CliError {
    fn from(e: RetrievalError) -> Self {
        PredictError::from(e).into()
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<UsabilityError> for CliError {
    fn from(e: UsabilityError) -> Self {
        CliError::Data(e.to_string())
    }
}
