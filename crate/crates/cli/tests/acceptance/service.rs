//! In-process golden requests against the HTTP API, each response checked
//! against the published JSON schema.

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use protopredict::assets;
use protopredict_service::api::API_JSON_SCHEMA;
use protopredict_service::{router, AppState, ServiceConfig};

struct Golden {
    method: Method,
    uri: String,
    body: Option<Value>,
    status: StatusCode,
    def: &'static str,
}

fn golden(
    method: Method,
    uri: impl Into<String>,
    body: Option<Value>,
    status: StatusCode,
    def: &'static str,
) -> Golden {
    Golden {
        method,
        uri: uri.into(),
        body,
        status,
        def,
    }
}

fn check(def: &str, body: &Value) -> Result<(), String> {
    let root: Value = serde_json::from_str(API_JSON_SCHEMA).map_err(|e| e.to_string())?;
    let schema = json!({ "$schema": root["$schema"], "$defs": root["$defs"], "$ref": format!("#/$defs/{def}") });
    let v = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
    let errors: Vec<String> = v
        .iter_errors(body)
        .map(|e| format!("{e} at {}", e.instance_path))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(format!("{def}: {errors:?}"))
    }
}

async fn send(app: &axum::Router, g: &Golden) -> Result<Value, String> {
    let req = Request::builder()
        .method(g.method.clone())
        .uri(&g.uri)
        .header("content-type", "application/json");
    let req = match &g.body {
        Some(b) => req.body(Body::from(serde_json::to_vec(b).unwrap())),
        None => req.body(Body::empty()),
    }
    .map_err(|e| e.to_string())?;
    let resp = app.clone().oneshot(req).await.map_err(|e| e.to_string())?;
    let status = resp.status();
    let bytes = resp.into_body().collect().await.map_err(|e| e.to_string())?.to_bytes();
    let body: Value = serde_json::from_slice(&bytes).map_err(|e| format!("{} {}: {e}", g.method, g.uri))?;
    if status != g.status {
        return Err(format!(
            "{} {}: status {status}, want {}: {body}",
            g.method, g.uri, g.status
        ));
    }
    check(g.def, &body).map_err(|e| format!("{} {}: {e}", g.method, g.uri))?;
    Ok(body)
}

fn brief() -> Value {
    json!({
        "problem": "Hair dryer airflow is diffuse and slow to style hair",
        "design_solution": "A clip-on nozzle attachment that concentrates airflow",
        "key_functions": ["concentrate airflow", "clip onto dryer", "resist heat"],
        "dimensions_and_weight": "60 mm x 80 mm, 40 g"
    })
}

async fn suite(app: axum::Router) -> Result<(), String> {
    use Method as M;
    use StatusCode as S;
    send(&app, &golden(M::GET, "/v1/healthz", None, S::OK, "HealthResponse")).await?;
    let created = send(
        &app,
        &golden(
            M::POST,
            "/v1/sessions",
            Some(json!({ "brief": brief() })),
            S::CREATED,
            "SessionResponse",
        ),
    )
    .await?;
    let id = created["session"]["session_id"]
        .as_str()
        .ok_or("no session id")?
        .to_owned();
    let turns = format!("/v1/sessions/{id}/turns");
    for task in ["cost", "usability"] {
        let req = json!({ "message": "Estimate", "task": task, "n": 5, "seed": 1 });
        send(&app, &golden(M::POST, &turns, Some(req), S::CREATED, "TurnResponse")).await?;
    }
    let session = send(
        &app,
        &golden(M::GET, format!("/v1/sessions/{id}"), None, S::OK, "SessionResponse"),
    )
    .await?;
    let history = session["session"]["history"].as_array().map_or(0, Vec::len);
    if history != 4 {
        return Err(format!("session history has {history} turns, want 4"));
    }
    let predict = json!({ "brief": brief(), "task": "performance", "unit": "m/s", "n": 3, "seed": 2 });
    send(
        &app,
        &golden(M::POST, "/v1/predict", Some(predict), S::OK, "PredictResponse"),
    )
    .await?;
    send(&app, &golden(M::GET, "/v1/cases", None, S::OK, "CasesResponse")).await?;
    let bench = send(
        &app,
        &golden(
            M::POST,
            "/v1/bench",
            Some(json!({ "n": 3, "seed": 7 })),
            S::CREATED,
            "BenchResponse",
        ),
    )
    .await?;
    let run_id = bench["run_id"].as_str().ok_or("no run id")?;
    send(
        &app,
        &golden(M::GET, format!("/v1/reports/{run_id}"), None, S::OK, "ReportResponse"),
    )
    .await?;

    for g in [
        golden(M::GET, "/v1/sessions/nope", None, S::NOT_FOUND, "ErrorResponse"),
        golden(
            M::GET,
            "/v1/reports/0000000000000000",
            None,
            S::NOT_FOUND,
            "ErrorResponse",
        ),
        golden(
            M::POST,
            "/v1/sessions",
            Some(json!({ "brief": { "problem": "p" } })),
            S::UNPROCESSABLE_ENTITY,
            "ErrorResponse",
        ),
        golden(
            M::POST,
            "/v1/predict",
            Some(json!({ "brief": brief(), "task": "colour" })),
            S::UNPROCESSABLE_ENTITY,
            "ErrorResponse",
        ),
        golden(
            M::POST,
            &turns,
            Some(json!({ "message": "x", "task": "cost", "n": 0 })),
            S::UNPROCESSABLE_ENTITY,
            "ErrorResponse",
        ),
    ] {
        let body = send(&app, &g).await?;
        if body["error"]["status"] != g.status.as_u16() {
            return Err(format!("{} {}: error body {body}", g.method, g.uri));
        }
    }
    Ok(())
}

pub fn golden_suite() -> Result<(), String> {
    let state = AppState::new(ServiceConfig::mock(assets::demo_profile()));
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    let result = rt.block_on(suite(router(state.clone())));
    drop(rt);
    drop(state);
    result
}
