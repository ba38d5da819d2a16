use std::path::{Component, Path as FsPath};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine as _;
use serde::de::DeserializeOwned;

use crate::api::*;
use crate::store::extension_for;
use crate::{ApiError, SharedState};
use protopredict::assets;
use protopredict::gateway::{ImageAttachment, Task, MAX_IMAGE_BYTES};
use protopredict::predictor::{AggregatedPrediction, Predictor};
use protopredict::report::{
    parse_sources, run_benchmark, BenchConfig, GroupSource, SourceSpec, SourcesFile, SOURCES_SCHEMA,
};
use protopredict::seed;

const BODY_LIMIT: usize = 2 * MAX_IMAGE_BYTES;

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/v1/healthz", get(healthz))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(get_session))
        .route("/v1/sessions/{id}/turns", post(post_turn))
        .route("/v1/predict", post(predict))
        .route("/v1/cases", get(cases))
        .route("/v1/bench", post(bench))
        .route("/v1/reports/{run_id}", get(get_report))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339()
}

fn schema() -> String {
    API_SCHEMA.into()
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "body".to_string() } else { path };
        ApiError::invalid(field, e.into_inner().to_string())
    })
}

fn check_schema(s: &str) -> Result<(), ApiError> {
    if s != API_SCHEMA {
        return Err(ApiError::invalid(
            "schema",
            format!("expected {API_SCHEMA:?}, got {s:?}"),
        ));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<(), ApiError> {
    if n == 0 || n > MAX_N {
        return Err(ApiError::invalid("n", format!("n must lie in 1..={MAX_N}")));
    }
    Ok(())
}

fn check_unit(task: Task, unit: &Option<String>) -> Result<(), ApiError> {
    if task == Task::Performance && unit.as_deref().is_none_or(|u| u.trim().is_empty()) {
        return Err(ApiError::invalid("unit", "performance predictions need a unit"));
    }
    Ok(())
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))
}

async fn healthz(State(st): State<SharedState>) -> Json<HealthResponse> {
    Json(HealthResponse {
        schema: schema(),
        status: "ok".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        backend: st.config.gateway.backend_id(),
    })
}

async fn create_session(
    State(st): State<SharedState>,
    body: Bytes,
) -> Result<(StatusCode, Json<SessionResponse>), ApiError> {
    let req: CreateSessionRequest = parse(&body)?;
    check_schema(&req.schema)?;
    req.brief
        .validate()
        .map_err(|e| ApiError::from(protopredict::predictor::PredictError::from(e)))?;
    let t = now();
    let session = Session {
        session_id: uuid::Uuid::new_v4().to_string(),
        brief: req.brief,
        history: Vec::new(),
        created_at: t.clone(),
        updated_at: t,
    };
    st.config
        .store
        .put_session(session.clone())
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok((
        StatusCode::CREATED,
        Json(SessionResponse {
            schema: schema(),
            session,
        }),
    ))
}

async fn get_session(State(st): State<SharedState>, Path(id): Path<String>) -> Result<Json<SessionResponse>, ApiError> {
    let session = st
        .config
        .store
        .session(&id)
        .ok_or_else(|| ApiError::not_found("session", &id))?;
    Ok(Json(SessionResponse {
        schema: schema(),
        session,
    }))
}

fn decode_image(text: &str) -> Result<ImageAttachment, ApiError> {
    let b64 = match text.strip_prefix("data:") {
        Some(rest) => rest
            .split_once(";base64,")
            .map(|(_, b)| b)
            .ok_or_else(|| ApiError::invalid("image", "data URL must be base64 encoded"))?,
        None => text,
    };
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(b64.trim())
        .map_err(|e| ApiError::invalid("image", format!("invalid base64: {e}")))?;
    ImageAttachment::from_bytes(bytes).map_err(|e| ApiError::invalid("image", e.to_string()))
}

async fn post_turn(
    State(st): State<SharedState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<(StatusCode, Json<TurnResponse>), ApiError> {
    let req: TurnRequest = parse(&body)?;
    check_schema(&req.schema)?;
    check_n(req.n)?;
    check_unit(req.task, &req.unit)?;
    if req.message.trim().is_empty() {
        return Err(ApiError::invalid("message", "message must be non-empty"));
    }
    let image = req.image.as_deref().map(decode_image).transpose()?;

    let lock = st.session_lock(&id);
    let _guard = lock.lock().await;
    let mut session = st
        .config
        .store
        .session(&id)
        .ok_or_else(|| ApiError::not_found("session", &id))?;

    let mut attachments = Vec::new();
    if let Some(img) = &image {
        let (sha256, _) = st
            .config
            .store
            .put_image(&img.data, extension_for(&img.media_type))
            .map_err(|e| ApiError::internal(e.to_string()))?;
        attachments.push(Attachment {
            sha256,
            media_type: img.media_type.clone(),
            size_bytes: img.data.len(),
        });
    }
    let base_index = session.history.len();
    let user_turn = Turn {
        index: base_index,
        role: Role::User,
        content: req.message.clone(),
        task: Some(req.task),
        attachments,
        result: None,
        created_at: now(),
    };
    let mut pending = session.clone();
    pending.history.push(user_turn.clone());
    let mut brief = pending.accumulated_brief();
    if let Some(a) = pending.latest_attachment() {
        brief.image_ref = st.config.store.image_ref(&a.sha256, &a.media_type);
    }
    let seed = req
        .seed
        .unwrap_or_else(|| seed::derive_seed(seed::label(&id), &[base_index as u64]));

    let state = st.clone();
    let (task, unit, n) = (req.task, req.unit.clone(), req.n);
    let prediction = blocking(move || {
        let c = &state.config;
        Predictor::new(c.gateway.clone())
            .with_index(c.index.clone())
            .with_k(c.k)
            .predict_many(&brief, task, unit.as_deref(), n, c.parallelism, seed)
    })
    .await??;

    let improvements = prediction
        .samples
        .iter()
        .filter_map(|s| s.improvement.clone())
        .collect();
    let content = prediction
        .samples
        .first()
        .map(|s| s.raw_text.clone())
        .unwrap_or_default();
    let assistant = Turn {
        index: base_index + 1,
        role: Role::Assistant,
        content,
        task: Some(req.task),
        attachments: Vec::new(),
        result: Some(TurnResult {
            seed,
            prediction,
            improvements,
        }),
        created_at: now(),
    };
    session.history.push(user_turn.clone());
    session.history.push(assistant.clone());
    session.updated_at = assistant.created_at.clone();
    st.config
        .store
        .put_session(session)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok((
        StatusCode::CREATED,
        Json(TurnResponse {
            schema: schema(),
            session_id: id,
            turns: vec![user_turn, assistant],
        }),
    ))
}

async fn predict(State(st): State<SharedState>, body: Bytes) -> Result<Json<PredictResponse>, ApiError> {
    let req: PredictRequest = parse(&body)?;
    check_schema(&req.schema)?;
    check_n(req.n)?;
    check_unit(req.task, &req.unit)?;
    if req.k == Some(0) {
        return Err(ApiError::invalid("k", "k must be at least 1"));
    }
    let state = st.clone();
    let prediction: AggregatedPrediction = blocking(move || {
        let c = &state.config;
        Predictor::new(c.gateway.clone())
            .with_index(c.index.clone())
            .with_k(req.k.unwrap_or(c.k))
            .with_retrieval(req.retrieval)
            .predict_many(
                &req.brief,
                req.task,
                req.unit.as_deref(),
                req.n,
                c.parallelism,
                req.seed,
            )
    })
    .await??;
    Ok(Json(PredictResponse {
        schema: schema(),
        prediction,
    }))
}

async fn cases(State(st): State<SharedState>) -> Json<CasesResponse> {
    Json(CasesResponse {
        schema: schema(),
        cases: st.config.cases.clone(),
    })
}

fn is_plain_relative(p: &str) -> bool {
    FsPath::new(p).components().all(|c| matches!(c, Component::Normal(_)))
}

fn resolve_sources(st: &SharedState, specs: Option<Vec<SourceSpec>>) -> Result<Vec<GroupSource>, ApiError> {
    let Some(specs) = specs else {
        return Ok(assets::demo_sources());
    };
    for (i, s) in specs.iter().enumerate() {
        let SourceSpec::Recorded { path, .. } = s else { continue };
        let field = format!("sources[{i}].path");
        if st.config.store.dir().is_none() {
            return Err(ApiError::invalid(
                field,
                "recorded sources need a service data directory",
            ));
        }
        if !is_plain_relative(path) {
            return Err(ApiError::invalid(field, "path must be relative to the data directory"));
        }
    }
    let base = st.config.store.dir().unwrap_or(FsPath::new(".")).to_owned();
    let text = serde_json::to_string(&SourcesFile {
        schema: SOURCES_SCHEMA.into(),
        sources: specs,
    })
    .expect("sources serialize");
    Ok(parse_sources(&text, &base)?)
}

async fn bench(State(st): State<SharedState>, body: Bytes) -> Result<(StatusCode, Json<BenchResponse>), ApiError> {
    let req: BenchRequest = parse(&body)?;
    check_schema(&req.schema)?;
    let n = req.n.unwrap_or(30);
    check_n(n)?;
    let state = st.clone();
    let report = blocking(move || {
        let sources = resolve_sources(&state, req.sources)?;
        let cfg = BenchConfig {
            n,
            seed: req.seed,
            parallelism: state.config.parallelism,
            ..BenchConfig::default()
        };
        run_benchmark(&state.config.cases, &sources, &cfg, &state.config.scorer).map_err(ApiError::from)
    })
    .await??;
    let (run_id, summary) = (report.manifest.run_id.clone(), report.summary.clone());
    st.config
        .store
        .put_report(report)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok((
        StatusCode::CREATED,
        Json(BenchResponse {
            schema: schema(),
            run_id,
            summary,
        }),
    ))
}

async fn get_report(
    State(st): State<SharedState>,
    Path(run_id): Path<String>,
) -> Result<Json<ReportResponse>, ApiError> {
    let report = st
        .config
        .store
        .report(&run_id)
        .ok_or_else(|| ApiError::not_found("report", &run_id))?;
    Ok(Json(ReportResponse {
        schema: schema(),
        report,
    }))
}
