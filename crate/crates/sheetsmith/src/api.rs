//! REST surface over the orchestrator and store.
//!
//! Bodies are the canonical JSON forms of the core types. Errors are
//! `{"code", "detail", "violation_paths"?, "stage"?}` with 4xx for caller
//! faults and 5xx for stage or provider faults. `POST /sessions/{id}/run`
//! answers 202 and works in the background; poll `GET /sessions/{id}`
//! (the `x-run-active` header is `true` while it works) or pass
//! `?wait=true` to block until the run stops.

use std::collections::{BTreeMap, HashSet};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{FromRequest, Path, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sheetsmith_core::{
    ExportKind, ExportOutcome, KnowledgePack, LearnerProfile, PackId, PipelineSession, ProfileId,
    ReviewDecision, SchemaViolation, TaskId, TaskItem, TaskSource, Verdict,
};

use crate::orchestrator::{FailureCause, Orchestrator, OrchestratorError};
use crate::store::{Document, StoreError};

pub const TOKEN_ENV: &str = "SHEETSMITH_TOKEN";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation_paths: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<&'static str>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, detail: impl Into<String>) -> Self {
        Self {
            status,
            code,
            detail: detail.into(),
            violation_paths: None,
            stage: None,
        }
    }

    fn schema(v: SchemaViolation) -> Self {
        let paths = v.paths().into_iter().map(String::from).collect();
        Self {
            violation_paths: Some(paths),
            ..Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "schema_violation",
                v.to_string(),
            )
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, axum::Json(&self)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Invariant(v) => Self::schema(v),
            StoreError::InvalidId(id) => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_id",
                format!("invalid id {id:?}"),
            ),
            other => Self::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "storage",
                other.to_string(),
            ),
        }
    }
}

impl From<OrchestratorError> for ApiError {
    fn from(e: OrchestratorError) -> Self {
        let detail = e.to_string();
        match e {
            OrchestratorError::UnknownProfile(_) => {
                Self::new(StatusCode::NOT_FOUND, "unknown_profile", detail)
            }
            OrchestratorError::UnknownTask(_) => {
                Self::new(StatusCode::NOT_FOUND, "unknown_task", detail)
            }
            OrchestratorError::UnknownPack(_) => {
                Self::new(StatusCode::NOT_FOUND, "unknown_pack", detail)
            }
            OrchestratorError::UnknownSession(_) => {
                Self::new(StatusCode::NOT_FOUND, "unknown_session", detail)
            }
            OrchestratorError::IllegalState { .. } => {
                Self::new(StatusCode::CONFLICT, "illegal_state", detail)
            }
            OrchestratorError::Invalid(v) => Self::schema(v),
            OrchestratorError::Unsafe(_) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "unsafe_latex", detail)
            }
            OrchestratorError::LintBlocked(_) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "lint_errors", detail)
            }
            OrchestratorError::StageFailed { stage, cause, .. } => {
                let (status, code) = match cause {
                    FailureCause::Provider => (StatusCode::BAD_GATEWAY, "provider_failure"),
                    FailureCause::Pipeline => (StatusCode::INTERNAL_SERVER_ERROR, "stage_failed"),
                };
                Self {
                    stage: Some(stage.as_str()),
                    ..Self::new(status, code, detail)
                }
            }
            OrchestratorError::Store(s) => s.into(),
        }
    }
}

/// One documented route. [`openapi`] is generated from [`ROUTES`].
#[derive(Debug, Clone, Copy)]
pub struct RouteSpec {
    pub method: &'static str,
    pub path: &'static str,
    pub summary: &'static str,
    pub success: u16,
    /// Error statuses the route can answer besides 401.
    pub errors: &'static [u16],
}

pub const ROUTES: &[RouteSpec] = &[
    RouteSpec { method: "GET", path: "/healthz", summary: "Liveness probe", success: 200, errors: &[] },
    RouteSpec { method: "GET", path: "/openapi.json", summary: "This description", success: 200, errors: &[] },
    RouteSpec { method: "POST", path: "/profiles", summary: "Create a learner profile", success: 201, errors: &[409, 422] },
    RouteSpec { method: "GET", path: "/profiles", summary: "List learner profiles", success: 200, errors: &[] },
    RouteSpec { method: "GET", path: "/profiles/{id}", summary: "Fetch a learner profile", success: 200, errors: &[404] },
    RouteSpec { method: "PUT", path: "/profiles/{id}", summary: "Replace a learner profile", success: 200, errors: &[404, 422] },
    RouteSpec { method: "DELETE", path: "/profiles/{id}", summary: "Delete a learner profile", success: 204, errors: &[404] },
    RouteSpec {
        method: "POST",
        path: "/tasks",
        summary: "Create a task from JSON, or upload its statement as text/plain with subject, grade_level, topic and optional id query parameters",
        success: 201,
        errors: &[409, 422],
    },
    RouteSpec { method: "GET", path: "/tasks", summary: "List tasks", success: 200, errors: &[] },
    RouteSpec { method: "GET", path: "/tasks/{id}", summary: "Fetch a task", success: 200, errors: &[404] },
    RouteSpec { method: "POST", path: "/packs", summary: "Create a knowledge pack", success: 201, errors: &[409, 422] },
    RouteSpec { method: "GET", path: "/packs", summary: "List knowledge packs", success: 200, errors: &[] },
    RouteSpec { method: "GET", path: "/packs/{id}", summary: "Fetch a knowledge pack", success: 200, errors: &[404] },
    RouteSpec { method: "POST", path: "/sessions", summary: "Create a session", success: 201, errors: &[404, 422] },
    RouteSpec { method: "GET", path: "/sessions", summary: "List sessions", success: 200, errors: &[] },
    RouteSpec { method: "GET", path: "/sessions/{id}", summary: "Fetch a session record", success: 200, errors: &[404] },
    RouteSpec {
        method: "POST",
        path: "/sessions/{id}/advance",
        summary: "Run exactly one stage",
        success: 200,
        errors: &[404, 409, 500, 502],
    },
    RouteSpec {
        method: "POST",
        path: "/sessions/{id}/run",
        summary: "Drive the session to review in the background (202), or in the foreground with ?wait=true (200)",
        success: 202,
        errors: &[404, 409, 500, 502],
    },
    RouteSpec {
        method: "POST",
        path: "/sessions/{id}/review",
        summary: "Accept, reject or modify the worksheet",
        success: 200,
        errors: &[404, 409, 422],
    },
    RouteSpec {
        method: "GET",
        path: "/sessions/{id}/artifact.tex",
        summary: "Worksheet LaTeX source",
        success: 200,
        errors: &[404],
    },
    RouteSpec {
        method: "GET",
        path: "/sessions/{id}/artifact.pdf",
        summary: "Rendered PDF of an accepted worksheet",
        success: 200,
        errors: &[404, 409, 500],
    },
    RouteSpec {
        method: "GET",
        path: "/sessions/{id}/artifact.docx",
        summary: "Converted docx of an accepted worksheet",
        success: 200,
        errors: &[404, 409, 500],
    },
];

/// Every error `code` with its HTTP status.
pub const ERROR_CODES: &[(&str, u16)] = &[
    ("unauthorized", 401),
    ("not_found", 404),
    ("unknown_profile", 404),
    ("unknown_task", 404),
    ("unknown_pack", 404),
    ("unknown_session", 404),
    ("artifact_not_ready", 404),
    ("already_exists", 409),
    ("illegal_state", 409),
    ("render_skipped", 409),
    ("schema_violation", 422),
    ("invalid_json", 422),
    ("invalid_id", 422),
    ("unsafe_latex", 422),
    ("lint_errors", 422),
    ("stage_failed", 500),
    ("render_failed", 500),
    ("storage", 500),
    ("provider_failure", 502),
];

/// OpenAPI 3.1 description generated from [`ROUTES`].
pub fn openapi() -> Value {
    let mut paths: BTreeMap<&str, serde_json::Map<String, Value>> = BTreeMap::new();
    for r in ROUTES {
        let mut responses = serde_json::Map::new();
        responses.insert(r.success.to_string(), json!({"description": "success"}));
        for e in r.errors {
            let codes: Vec<&str> = ERROR_CODES
                .iter()
                .filter(|(_, s)| s == e)
                .map(|(c, _)| *c)
                .collect();
            responses.insert(
                e.to_string(),
                json!({"description": format!("error; code one of {}", codes.join(", ")), "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ApiError"}}}}),
            );
        }
        let mut op = json!({"summary": r.summary, "responses": responses});
        if r.path.contains("{id}") {
            op["parameters"] = json!([{"name": "id", "in": "path", "required": true, "schema": {"type": "string"}}]);
        }
        paths
            .entry(r.path)
            .or_default()
            .insert(r.method.to_lowercase(), op);
    }
    json!({
        "openapi": "3.1.0",
        "info": {"title": "sheetsmith", "version": env!("CARGO_PKG_VERSION")},
        "paths": paths,
        "components": {"schemas": {"ApiError": {
            "type": "object",
            "required": ["code", "detail"],
            "properties": {
                "code": {"type": "string", "enum": ERROR_CODES.iter().map(|(c, _)| *c).collect::<Vec<_>>()},
                "detail": {"type": "string"},
                "violation_paths": {"type": "array", "items": {"type": "string"}},
                "stage": {"type": "string"}
            }
        }}},
        "security": [{"bearer": []}]
    })
}

#[derive(Clone)]
pub struct AppState {
    orch: Orchestrator,
    token: Option<String>,
    running: Arc<Mutex<HashSet<String>>>,
}

impl AppState {
    pub fn new(orch: Orchestrator, token: Option<String>) -> Self {
        Self {
            orch,
            token: token.filter(|t| !t.is_empty()),
            running: Arc::default(),
        }
    }
}

/// JSON body whose parse failures answer 422 `invalid_json`.
pub struct Body<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for Body<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        let bytes = Bytes::from_request(req, state).await.map_err(|e| {
            ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_json",
                e.to_string(),
            )
        })?;
        serde_json::from_slice(&bytes).map(Body).map_err(|e| {
            ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_json",
                e.to_string(),
            )
        })
    }
}

type ApiResult<T = Response> = Result<T, ApiError>;

/// Runs blocking orchestrator work off the async executor.
async fn blocking<T: Send + 'static>(
    state: &AppState,
    f: impl FnOnce(Orchestrator) -> Result<T, ApiError> + Send + 'static,
) -> ApiResult<T> {
    let orch = state.orch.clone();
    tokio::task::spawn_blocking(move || f(orch))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", e.to_string()))?
}

fn json_response(status: StatusCode, value: &impl Serialize) -> Response {
    (status, axum::Json(value)).into_response()
}

async fn create_doc<D: Document + Send + 'static>(state: &AppState, doc: D) -> ApiResult {
    blocking(state, move |o| {
        if o.store().contains::<D>(doc.key()) {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "already_exists",
                format!("{} {:?} exists", D::DIR, doc.key()),
            ));
        }
        o.store().put(&doc)?;
        Ok(json_response(StatusCode::CREATED, &doc))
    })
    .await
}

async fn get_doc<D: Document + Send + 'static>(
    state: &AppState,
    id: String,
    code: &'static str,
) -> ApiResult {
    blocking(state, move |o| match o.store().get::<D>(&id)? {
        Some(d) => Ok(json_response(StatusCode::OK, &d)),
        None => Err(ApiError::new(
            StatusCode::NOT_FOUND,
            code,
            format!("no such id {id:?}"),
        )),
    })
    .await
}

async fn list_docs<D: Document + Send + 'static>(state: &AppState) -> ApiResult {
    blocking(state, |o| {
        Ok(json_response(StatusCode::OK, &o.store().list::<D>()?))
    })
    .await
}

async fn healthz(State(state): State<AppState>) -> Response {
    json_response(
        StatusCode::OK,
        &json!({"status": "ok", "provider": state.orch.gateway().provider_kind()}),
    )
}

async fn openapi_doc() -> Response {
    json_response(StatusCode::OK, &openapi())
}

async fn create_profile(State(s): State<AppState>, Body(p): Body<LearnerProfile>) -> ApiResult {
    create_doc(&s, p).await
}

async fn list_profiles(State(s): State<AppState>) -> ApiResult {
    list_docs::<LearnerProfile>(&s).await
}

async fn get_profile(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult {
    get_doc::<LearnerProfile>(&s, id, "unknown_profile").await
}

async fn put_profile(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Body(p): Body<LearnerProfile>,
) -> ApiResult {
    if p.id.as_str() != id {
        return Err(ApiError {
            violation_paths: Some(vec!["id".into()]),
            ..ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "schema_violation",
                "body id differs from the path id",
            )
        });
    }
    blocking(&s, move |o| {
        if !o.store().contains::<LearnerProfile>(&id) {
            return Err(ApiError::new(
                StatusCode::NOT_FOUND,
                "unknown_profile",
                format!("no such id {id:?}"),
            ));
        }
        o.store().put(&p)?;
        Ok(json_response(StatusCode::OK, &p))
    })
    .await
}

async fn delete_profile(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult {
    blocking(&s, move |o| {
        let removed =
            sheetsmith_core::is_valid_id(&id) && o.store().delete::<LearnerProfile>(&id)?;
        if removed {
            Ok(StatusCode::NO_CONTENT.into_response())
        } else {
            Err(ApiError::new(
                StatusCode::NOT_FOUND,
                "unknown_profile",
                format!("no such id {id:?}"),
            ))
        }
    })
    .await
}

#[derive(Debug, Deserialize)]
struct UploadQuery {
    id: Option<String>,
    subject: Option<String>,
    grade_level: Option<u8>,
    topic: Option<String>,
}

async fn create_task(
    State(s): State<AppState>,
    headers: HeaderMap,
    Query(q): Query<UploadQuery>,
    body: Bytes,
) -> ApiResult {
    let is_text = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|ct| ct.starts_with("text/plain"));
    let task = if is_text {
        let statement = String::from_utf8(body.to_vec()).map_err(|_| {
            ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_json",
                "task upload is not UTF-8",
            )
        })?;
        let missing: Vec<String> = [
            ("subject", q.subject.is_none()),
            ("grade_level", q.grade_level.is_none()),
            ("topic", q.topic.is_none()),
        ]
        .iter()
        .filter(|(_, m)| *m)
        .map(|(k, _)| (*k).to_string())
        .collect();
        if !missing.is_empty() {
            return Err(ApiError {
                violation_paths: Some(missing),
                ..ApiError::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "schema_violation",
                    "text upload needs subject, grade_level and topic query parameters",
                )
            });
        }
        TaskItem {
            id: TaskId(q.id.unwrap_or_else(|| format!("task-{}", uuid::Uuid::new_v4().simple()))),
            subject: q.subject.unwrap_or_default(),
            grade_level: q.grade_level.unwrap_or_default(),
            topic: q.topic.unwrap_or_default(),
            statement: statement.trim().to_string(),
            source: TaskSource::Uploaded,
        }
    } else {
        serde_json::from_slice(&body).map_err(|e| {
            ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_json",
                e.to_string(),
            )
        })?
    };
    create_doc(&s, task).await
}

async fn list_tasks(State(s): State<AppState>) -> ApiResult {
    list_docs::<TaskItem>(&s).await
}

async fn get_task(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult {
    get_doc::<TaskItem>(&s, id, "unknown_task").await
}

async fn create_pack(State(s): State<AppState>, Body(p): Body<KnowledgePack>) -> ApiResult {
    create_doc(&s, p).await
}

async fn list_packs(State(s): State<AppState>) -> ApiResult {
    list_docs::<KnowledgePack>(&s).await
}

async fn get_pack(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult {
    get_doc::<KnowledgePack>(&s, id, "unknown_pack").await
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    profile_id: ProfileId,
    task_id: TaskId,
    #[serde(default)]
    pack_ids: Option<Vec<PackId>>,
}

async fn create_session(State(s): State<AppState>, Body(req): Body<CreateSession>) -> ApiResult {
    blocking(&s, move |o| {
        let session = o.create_session(&req.profile_id, &req.task_id, req.pack_ids)?;
        Ok(json_response(StatusCode::CREATED, &session))
    })
    .await
}

async fn list_sessions(State(s): State<AppState>) -> ApiResult {
    list_docs::<PipelineSession>(&s).await
}

async fn get_session(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let active = s.running.lock().expect("run set").contains(&id);
    let mut resp = blocking(&s, move |o| {
        Ok(json_response(StatusCode::OK, &o.session(&id)?))
    })
    .await?;
    resp.headers_mut().insert(
        "x-run-active",
        HeaderValue::from_static(if active { "true" } else { "false" }),
    );
    Ok(resp)
}

async fn advance(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult {
    blocking(&s, move |o| {
        Ok(json_response(StatusCode::OK, &o.advance(&id)?))
    })
    .await
}

#[derive(Debug, Deserialize)]
struct RunQuery {
    #[serde(default)]
    wait: bool,
}

async fn run(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<RunQuery>,
) -> ApiResult {
    if q.wait {
        return blocking(&s, move |o| {
            Ok(json_response(StatusCode::OK, &o.run_to_review(&id)?))
        })
        .await;
    }
    let session = {
        let id = id.clone();
        blocking(&s, move |o| Ok(o.session(&id)?)).await?
    };
    if session.state.is_terminal() {
        return Err(OrchestratorError::IllegalState {
            state: session.state,
            action: "run",
        }
        .into());
    }
    if !s.running.lock().expect("run set").insert(id.clone()) {
        return Ok(json_response(StatusCode::ACCEPTED, &session));
    }
    let running = s.running.clone();
    let orch = s.orch.clone();
    tokio::task::spawn_blocking(move || {
        if let Err(e) = orch.run_to_review(&id) {
            tracing::warn!(session = %id, error = %e, "background run stopped");
        }
        running.lock().expect("run set").remove(&id);
    });
    Ok(json_response(StatusCode::ACCEPTED, &session))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReviewRequest {
    verdict: Verdict,
    #[serde(default)]
    edited_latex: Option<String>,
    #[serde(default)]
    note: Option<String>,
}

async fn review(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Body(r): Body<ReviewRequest>,
) -> ApiResult {
    blocking(&s, move |o| {
        let decision = ReviewDecision {
            verdict: r.verdict,
            edited_latex: r.edited_latex,
            note: r.note,
            decided_at: o.now(),
        };
        Ok(json_response(
            StatusCode::OK,
            &o.apply_review(&id, decision)?,
        ))
    })
    .await
}

async fn artifact(
    State(s): State<AppState>,
    Path((id, file)): Path<(String, String)>,
) -> ApiResult {
    let kind = match file.as_str() {
        "artifact.tex" => None,
        "artifact.pdf" => Some(ExportKind::Pdf),
        "artifact.docx" => Some(ExportKind::Docx),
        _ => {
            return Err(ApiError::new(
                StatusCode::NOT_FOUND,
                "not_found",
                format!("no route for {file:?}"),
            ))
        }
    };
    blocking(&s, move |o| {
        let session = o.session(&id)?;
        let not_ready = || {
            ApiError::new(
                StatusCode::NOT_FOUND,
                "artifact_not_ready",
                format!("{file} not produced yet"),
            )
        };
        let worksheet = session.worksheet.as_ref().ok_or_else(not_ready)?;
        let Some(kind) = kind else {
            return Ok((
                [(header::CONTENT_TYPE, "application/x-tex")],
                worksheet.latex_source.clone(),
            )
                .into_response());
        };
        match worksheet.exports.get(&kind).ok_or_else(not_ready)? {
            ExportOutcome::Stored { artifact, .. } => {
                let bytes = o.store().get_blob(artifact)?.ok_or_else(|| {
                    ApiError::new(
                        StatusCode::INTERNAL_SERVER_ERROR,
                        "storage",
                        format!("blob {} missing", artifact.as_str()),
                    )
                })?;
                Ok(([(header::CONTENT_TYPE, content_type(kind))], bytes).into_response())
            }
            ExportOutcome::Skipped { reason } => Err(ApiError::new(
                StatusCode::CONFLICT,
                "render_skipped",
                reason.clone(),
            )),
            ExportOutcome::Failed { log_excerpt } => Err(ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "render_failed",
                log_excerpt.clone(),
            )),
        }
    })
    .await
}

pub fn content_type(kind: ExportKind) -> &'static str {
    match kind {
        ExportKind::Pdf => "application/pdf",
        ExportKind::Docx => {
            "application/vnd.openxmlformats-officedocument.wordprocessingml.document"
        }
    }
}

async fn not_found(method: Method, uri: axum::http::Uri) -> ApiError {
    ApiError::new(
        StatusCode::NOT_FOUND,
        "not_found",
        format!("no route for {method} {}", uri.path()),
    )
}

async fn require_token(State(s): State<AppState>, req: Request, next: Next) -> Response {
    if let Some(token) = &s.token {
        let ok = req.uri().path() == "/healthz"
            || req
                .headers()
                .get(header::AUTHORIZATION)
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.strip_prefix("Bearer "))
                .is_some_and(|t| t == token);
        if !ok {
            return ApiError::new(
                StatusCode::UNAUTHORIZED,
                "unauthorized",
                "missing or wrong bearer token",
            )
            .into_response();
        }
    }
    next.run(req).await
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/openapi.json", get(openapi_doc))
        .route("/profiles", post(create_profile).get(list_profiles))
        .route(
            "/profiles/{id}",
            get(get_profile).put(put_profile).delete(delete_profile),
        )
        .route("/tasks", post(create_task).get(list_tasks))
        .route("/tasks/{id}", get(get_task))
        .route("/packs", post(create_pack).get(list_packs))
        .route("/packs/{id}", get(get_pack))
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/advance", post(advance))
        .route("/sessions/{id}/run", post(run))
        .route("/sessions/{id}/review", post(review))
        .route("/sessions/{id}/{file}", get(artifact))
        .fallback(not_found)
        .layer(middleware::from_fn_with_state(state.clone(), require_token))
        .with_state(state)
}

/// Serves until `shutdown` resolves, then lets in-flight requests finish.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: AppState,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}
