//! HTTP contract walks shared by the `api` and `acceptance` targets.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::{Arc, Mutex};

use super::*;
use axum::body::Body as HttpBody;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use sheetsmith::api::{openapi, router, ApiError, AppState, ERROR_CODES, ROUTES};
use sheetsmith::core::{SchemaViolation, SessionState, Trigger, ViolationKind};
use sheetsmith::orchestrator::{FailureCause, OrchestratorError};
use sheetsmith::render::ToolchainConfig;
use sheetsmith::store::StoreError;
use tower::ServiceExt;

struct Resp {
    status: StatusCode,
    headers: axum::http::HeaderMap,
    bytes: Vec<u8>,
}

impl Resp {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.bytes)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.bytes)))
    }

    fn code(&self) -> String {
        self.json()["code"].as_str().unwrap_or_default().to_string()
    }
}

/// Drives the router and checks every answer against the documented route table.
struct Client {
    app: Router,
    token: Option<String>,
    /// (method, path template, status) for every documented route answered.
    seen: Arc<Mutex<BTreeSet<(String, String, u16)>>>,
}

fn template(method: &str, path: &str) -> Option<&'static sheetsmith::api::RouteSpec> {
    let path = path.split('?').next().unwrap();
    let segs: Vec<&str> = path.split('/').collect();
    ROUTES.iter().find(|r| {
        let t: Vec<&str> = r.path.split('/').collect();
        r.method == method
            && t.len() == segs.len()
            && t.iter().zip(&segs).all(|(a, b)| *a == "{id}" || a == b)
    })
}

impl Client {
    fn new(root: &Path, toolchain: ToolchainConfig, token: Option<&str>) -> Self {
        let orch = open(root, mock("dyslexia"), toolchain, None);
        orch.recover().unwrap();
        Self {
            app: router(AppState::new(orch, token.map(String::from))),
            token: token.map(String::from),
            seen: Arc::default(),
        }
    }

    async fn send(&self, method: &str, path: &str, content_type: &str, body: Vec<u8>) -> Resp {
        let mut req = Request::builder()
            .method(method)
            .uri(path)
            .header(header::CONTENT_TYPE, content_type);
        if let Some(t) = &self.token {
            req = req.header(header::AUTHORIZATION, format!("Bearer {t}"));
        }
        let resp = self
            .app
            .clone()
            .oneshot(req.body(HttpBody::from(body)).unwrap())
            .await
            .unwrap();
        let status = resp.status();
        let headers = resp.headers().clone();
        let bytes = resp
            .into_body()
            .collect()
            .await
            .unwrap()
            .to_bytes()
            .to_vec();
        let resp = Resp {
            status,
            headers,
            bytes,
        };
        match template(method, path) {
            Some(r) => {
                let allowed: Vec<u16> = std::iter::once(r.success)
                    .chain([200])
                    .chain(r.errors.iter().copied())
                    .chain([401])
                    .collect();
                assert!(
                    allowed.contains(&status.as_u16()),
                    "{method} {path}: undocumented status {status}"
                );
                self.seen
                    .lock()
                    .unwrap()
                    .insert((r.method.into(), r.path.into(), status.as_u16()));
            }
            None => assert_eq!(
                (status, resp.code()),
                (StatusCode::NOT_FOUND, "not_found".into()),
                "{method} {path}"
            ),
        }
        if !status.is_success() {
            let v = resp.json();
            let code = v["code"].as_str().expect("error bodies carry a code");
            let documented = ERROR_CODES
                .iter()
                .find(|(c, _)| *c == code)
                .unwrap_or_else(|| panic!("undocumented code {code}"));
            assert_eq!(documented.1, status.as_u16(), "{code}");
        }
        resp
    }

    async fn get(&self, path: &str) -> Resp {
        self.send("GET", path, "application/json", Vec::new()).await
    }

    async fn post(&self, path: &str, body: Value) -> Resp {
        self.send(
            "POST",
            path,
            "application/json",
            body.to_string().into_bytes(),
        )
        .await
    }
}

fn json_of<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap()
}

#[cfg(unix)]
fn toolchain(dir: &Path) -> ToolchainConfig {
    let pdf = script(
        dir,
        "pdf",
        r#"printf '%%PDF-1.4\n<< /Type /Page >>\n' > "$1""#,
    );
    let docx = script(dir, "docx", r#"printf 'PK docx' > "$1""#);
    ToolchainConfig {
        latex_compiler_cmd: Some(vec![pdf.display().to_string(), "{output}".into()]),
        docx_converter_cmd: Some(vec![docx.display().to_string(), "{output}".into()]),
        render_timeout_s: 10,
    }
}

/// No PDF compiler, and a docx converter that always fails.
#[cfg(unix)]
fn broken_toolchain(dir: &Path) -> ToolchainConfig {
    let docx = script(dir, "docx", "echo '! conversion failed' >&2; exit 3");
    ToolchainConfig {
        docx_converter_cmd: Some(vec![docx.display().to_string()]),
        ..ToolchainConfig::default()
    }
}

#[cfg(unix)]
/// method, path, content type, body, status, error code
type ErrorCase<'a> = (&'a str, String, &'a str, Vec<u8>, u16, &'a str);

pub async fn full_route_table_against_a_fresh_store() {
    let store = tempfile::tempdir().unwrap();
    let tools = tempfile::tempdir().unwrap();
    let c = Client::new(store.path(), toolchain(tools.path()), None);

    assert_eq!(
        c.get("/healthz").await.json(),
        json!({"status": "ok", "provider": "mock"})
    );
    assert_eq!(c.get("/openapi.json").await.json(), openapi());

    // Documents round-trip bit-identically.
    let profile = weak_reader();
    let created = c.post("/profiles", json_of(&profile)).await;
    assert_eq!(created.status, StatusCode::CREATED);
    let fetched = c.get("/profiles/weak-reader").await;
    assert_eq!(fetched.bytes, created.bytes);
    assert_eq!(fetched.json(), json_of(&profile));
    assert_eq!(c.get("/profiles").await.json(), json!([json_of(&profile)]));
    let mut edited = strong_solver();
    edited.id = "weak-reader".into();
    let put = c
        .send(
            "PUT",
            "/profiles/weak-reader",
            "application/json",
            json_of(&edited).to_string().into_bytes(),
        )
        .await;
    assert_eq!(put.status, StatusCode::OK);
    assert_eq!(
        c.get("/profiles/weak-reader").await.json(),
        json_of(&edited)
    );
    let put = c
        .send(
            "PUT",
            "/profiles/weak-reader",
            "application/json",
            json_of(&profile).to_string().into_bytes(),
        )
        .await;
    assert_eq!(put.status, StatusCode::OK);
    assert_eq!(
        c.post("/profiles", json_of(&strong_solver())).await.status,
        StatusCode::CREATED
    );

    let task = fractions_task();
    assert_eq!(
        c.post("/tasks", json_of(&task)).await.status,
        StatusCode::CREATED
    );
    assert_eq!(c.get("/tasks/add-fractions").await.json(), json_of(&task));
    let upload = c
        .send(
            "POST",
            "/tasks?id=uploaded&subject=math&grade_level=5&topic=decimals",
            "text/plain",
            b"  Round 3.14 to one decimal.\n".to_vec(),
        )
        .await;
    assert_eq!(upload.status, StatusCode::CREATED);
    assert_eq!(
        upload.json(),
        json!({"id": "uploaded", "subject": "math", "grade_level": 5, "topic": "decimals", "statement": "Round 3.14 to one decimal.", "source": "uploaded"})
    );
    assert_eq!(c.get("/tasks").await.json().as_array().unwrap().len(), 2);

    let pack = curriculum_pack();
    assert_eq!(
        c.post("/packs", json_of(&pack)).await.status,
        StatusCode::CREATED
    );
    assert_eq!(
        c.get("/packs/fractions-curriculum").await.json(),
        json_of(&pack)
    );
    assert_eq!(c.get("/packs").await.json(), json!([json_of(&pack)]));

    let body = json!({"profile_id": "weak-reader", "task_id": "add-fractions", "pack_ids": ["fractions-curriculum"]});
    let s = c.post("/sessions", body.clone()).await;
    assert_eq!(s.status, StatusCode::CREATED);
    let id = s.json()["id"].as_str().unwrap().to_string();
    assert_eq!(c.get("/sessions").await.json().as_array().unwrap().len(), 1);
    assert_eq!(
        c.get(&format!("/sessions/{id}/artifact.tex")).await.code(),
        "artifact_not_ready"
    );

    let step = c
        .post(&format!("/sessions/{id}/advance"), json!(null))
        .await;
    assert_eq!(step.status, StatusCode::OK);
    assert_eq!(step.json()["state"], "simulated");
    let done = c
        .post(&format!("/sessions/{id}/run?wait=true"), json!(null))
        .await;
    assert_eq!(done.status, StatusCode::OK);
    assert_eq!(done.json()["state"], "awaiting_review");
    let got = c.get(&format!("/sessions/{id}")).await;
    assert_eq!(got.bytes, done.bytes);
    assert_eq!(got.headers["x-run-active"], "false");

    let tex = c.get(&format!("/sessions/{id}/artifact.tex")).await;
    assert_eq!(tex.status, StatusCode::OK);
    assert_eq!(tex.headers[header::CONTENT_TYPE], "application/x-tex");
    assert_eq!(
        String::from_utf8(tex.bytes).unwrap(),
        done.json()["worksheet"]["latex_source"].as_str().unwrap()
    );
    assert_eq!(
        c.get(&format!("/sessions/{id}/artifact.pdf")).await.code(),
        "artifact_not_ready"
    );

    let accepted = c
        .post(
            &format!("/sessions/{id}/review"),
            json!({"verdict": "accept", "note": "fine"}),
        )
        .await;
    assert_eq!(accepted.status, StatusCode::OK);
    let accepted = accepted.json();
    assert_eq!(accepted["state"], "accepted");
    assert_eq!(accepted["review"]["decided_at"], "2026-01-01T00:00:00Z");
    let pdf = c.get(&format!("/sessions/{id}/artifact.pdf")).await;
    assert_eq!(pdf.status, StatusCode::OK);
    assert_eq!(pdf.headers[header::CONTENT_TYPE], "application/pdf");
    assert!(pdf.bytes.starts_with(b"%PDF"));
    assert_eq!(
        pdf.bytes.len() as u64,
        accepted["worksheet"]["exports"]["pdf"]["bytes"]
            .as_u64()
            .unwrap()
    );
    let docx = c.get(&format!("/sessions/{id}/artifact.docx")).await;
    assert_eq!(docx.status, StatusCode::OK);
    assert_eq!(docx.bytes, b"PK docx");

    // A second session in the background, then reject it.
    let id2 = c.post("/sessions", body).await.json()["id"]
        .as_str()
        .unwrap()
        .to_string();
    let started = c.post(&format!("/sessions/{id2}/run"), json!(null)).await;
    assert_eq!(started.status, StatusCode::ACCEPTED);
    assert_eq!(started.json()["state"], "created");
    let mut state = String::new();
    for _ in 0..500 {
        let r = c.get(&format!("/sessions/{id2}")).await;
        state = r.json()["state"].as_str().unwrap().to_string();
        if state == "awaiting_review" && r.headers["x-run-active"] == "false" {
            break;
        }
        tokio::time::sleep(std::time::Duration::from_millis(10)).await;
    }
    assert_eq!(state, "awaiting_review");
    let rejected = c
        .post(
            &format!("/sessions/{id2}/review"),
            json!({"verdict": "reject"}),
        )
        .await;
    assert_eq!(rejected.json()["state"], "rejected");

    let del = c
        .send(
            "DELETE",
            "/profiles/strong-solver",
            "application/json",
            Vec::new(),
        )
        .await;
    assert_eq!(del.status, StatusCode::NO_CONTENT);
    assert_eq!(
        c.get("/profiles/strong-solver").await.code(),
        "unknown_profile"
    );

    let seen = c.seen.lock().unwrap();
    for r in ROUTES {
        assert!(
            seen.contains(&(r.method.to_string(), r.path.to_string(), r.success)),
            "{} {} never answered {}",
            r.method,
            r.path,
            r.success
        );
    }
}

#[cfg(unix)]
pub async fn error_code_table_over_http() {
    let store = tempfile::tempdir().unwrap();
    let tools = tempfile::tempdir().unwrap();
    seed(store.path());
    let c = Client::new(store.path(), broken_toolchain(tools.path()), None);
    let session = |profile: &str| json!({"profile_id": profile, "task_id": "add-fractions", "pack_ids": ["fractions-curriculum"]});
    let new_session = |r: Resp| r.json()["id"].as_str().unwrap().to_string();
    let reviewable = new_session(c.post("/sessions", session("weak-reader")).await);
    c.post(
        &format!("/sessions/{reviewable}/run?wait=true"),
        json!(null),
    )
    .await;
    let fresh = new_session(c.post("/sessions", session("weak-reader")).await);
    let no_fixture = new_session(c.post("/sessions", session("strong-solver")).await);
    c.post(
        "/profiles",
        json!({"id": "doomed", "name": "x", "persona_text": "gone soon"}),
    )
    .await;
    let orphan = new_session(c.post("/sessions", session("doomed")).await);
    c.send("DELETE", "/profiles/doomed", "application/json", Vec::new())
        .await;

    let compliant = worksheet("dyslexia_compliant.tex");
    let cases: Vec<ErrorCase> = vec![
        ("GET", "/nowhere".into(), "application/json", vec![], 404, "not_found"),
        ("GET", "/profiles/ghost".into(), "application/json", vec![], 404, "unknown_profile"),
        ("DELETE", "/profiles/ghost".into(), "application/json", vec![], 404, "unknown_profile"),
        ("GET", "/tasks/ghost".into(), "application/json", vec![], 404, "unknown_task"),
        ("GET", "/packs/ghost".into(), "application/json", vec![], 404, "unknown_pack"),
        ("GET", "/sessions/ghost".into(), "application/json", vec![], 404, "unknown_session"),
        ("POST", "/sessions/ghost/advance".into(), "application/json", vec![], 404, "unknown_session"),
        ("GET", format!("/sessions/{fresh}/artifact.tex"), "application/json", vec![], 404, "artifact_not_ready"),
        ("GET", format!("/sessions/{reviewable}/artifact.pdf"), "application/json", vec![], 404, "artifact_not_ready"),
        ("POST", "/sessions".into(), "application/json", session("ghost").to_string().into_bytes(), 404, "unknown_profile"),
        (
            "POST",
            "/sessions".into(),
            "application/json",
            json!({"profile_id": "weak-reader", "task_id": "ghost"}).to_string().into_bytes(),
            404,
            "unknown_task",
        ),
        (
            "POST",
            "/sessions".into(),
            "application/json",
            json!({"profile_id": "weak-reader", "task_id": "add-fractions", "pack_ids": ["ghost"]}).to_string().into_bytes(),
            404,
            "unknown_pack",
        ),
        ("POST", "/profiles".into(), "application/json", json_of(&weak_reader()).to_string().into_bytes(), 409, "already_exists"),
        ("POST", format!("/sessions/{reviewable}/advance"), "application/json", vec![], 409, "illegal_state"),
        ("POST", format!("/sessions/{fresh}/review"), "application/json", br#"{"verdict":"accept"}"#.to_vec(), 409, "illegal_state"),
        ("POST", "/profiles".into(), "application/json", b"{not json".to_vec(), 422, "invalid_json"),
        ("POST", "/sessions".into(), "application/json", br#"{"profile_id":"x"}"#.to_vec(), 422, "invalid_json"),
        (
            "POST",
            "/profiles".into(),
            "application/json",
            json!({"id": "bad id", "name": "x", "persona_text": " "}).to_string().into_bytes(),
            422,
            "schema_violation",
        ),
        ("POST", "/tasks?subject=math".into(), "text/plain", b"Add 1/2 and 1/3.".to_vec(), 422, "schema_violation"),
        (
            "POST",
            format!("/sessions/{reviewable}/review"),
            "application/json",
            json!({"verdict": "modify"}).to_string().into_bytes(),
            422,
            "schema_violation",
        ),
        (
            "POST",
            format!("/sessions/{reviewable}/review"),
            "application/json",
            json!({"verdict": "modify", "edited_latex": compliant.replace("\\end{document}", "\\write18{id}\\end{document}")})
                .to_string()
                .into_bytes(),
            422,
            "unsafe_latex",
        ),
        (
            "POST",
            format!("/sessions/{reviewable}/review"),
            "application/json",
            json!({"verdict": "modify", "edited_latex": compliant.replace("Glossary", "\\textit{Glossary}")}).to_string().into_bytes(),
            422,
            "lint_errors",
        ),
        ("POST", format!("/sessions/{orphan}/advance"), "application/json", vec![], 500, "stage_failed"),
        ("POST", format!("/sessions/{no_fixture}/advance"), "application/json", vec![], 502, "provider_failure"),
    ];
    let mut codes = BTreeSet::new();
    for (method, path, ct, body, status, code) in cases {
        let r = c.send(method, &path, ct, body).await;
        assert_eq!(
            (r.status.as_u16(), r.code()),
            (status, code.to_string()),
            "{method} {path}: {}",
            String::from_utf8_lossy(&r.bytes)
        );
        codes.insert(code);
    }
    let r = c
        .post(
            "/profiles",
            json!({"id": "bad id", "name": "x", "persona_text": " "}),
        )
        .await;
    assert_eq!(r.json()["violation_paths"], json!(["id", "persona_text"]));
    let r = c
        .post(&format!("/sessions/{no_fixture}/advance"), json!(null))
        .await;
    assert_eq!(r.json()["stage"], "simulate");
    let r = c
        .post(&format!("/sessions/{orphan}/advance"), json!(null))
        .await;
    assert_eq!(r.json()["stage"], "simulate");

    // The refused modifications never reached the store.
    let s = c.get(&format!("/sessions/{reviewable}")).await.json();
    assert_eq!(s["state"], "awaiting_review");
    assert_eq!(
        s["worksheet"]["latex_source"].as_str().unwrap(),
        compliant.trim_end()
    );

    // Render outcomes and remaining codes.
    c.post(
        &format!("/sessions/{reviewable}/review"),
        json!({"verdict": "accept"}),
    )
    .await;
    let r = c.get(&format!("/sessions/{reviewable}/artifact.pdf")).await;
    assert_eq!(
        (r.status.as_u16(), r.code()),
        (409, "render_skipped".into())
    );
    codes.insert("render_skipped");
    let r = c
        .get(&format!("/sessions/{reviewable}/artifact.docx"))
        .await;
    assert_eq!((r.status.as_u16(), r.code()), (500, "render_failed".into()));
    assert_eq!(r.json()["detail"], "! conversion failed");
    codes.insert("render_failed");
    assert_eq!(
        c.post(&format!("/sessions/{reviewable}/run"), json!(null))
            .await
            .code(),
        "illegal_state"
    );

    let documented: BTreeSet<&str> = ERROR_CODES.iter().map(|(c, _)| *c).collect();
    let untested: Vec<&&str> = documented.difference(&codes).collect();
    // unauthorized is covered by `bearer_token_guards_everything_but_healthz`;
    // invalid_id and storage are covered by `error_conversions`.
    assert_eq!(untested, [&"invalid_id", &"storage", &"unauthorized"]);
}

pub fn error_conversions() {
    let cases: Vec<(ApiError, u16, &str)> = vec![
        (
            OrchestratorError::UnknownProfile("p".into()).into(),
            404,
            "unknown_profile",
        ),
        (
            OrchestratorError::UnknownTask("t".into()).into(),
            404,
            "unknown_task",
        ),
        (
            OrchestratorError::UnknownPack("k".into()).into(),
            404,
            "unknown_pack",
        ),
        (
            OrchestratorError::UnknownSession("s".into()).into(),
            404,
            "unknown_session",
        ),
        (
            OrchestratorError::IllegalState {
                state: SessionState::Created,
                action: "advance",
            }
            .into(),
            409,
            "illegal_state",
        ),
        (
            OrchestratorError::Invalid(SchemaViolation::single("verdict", ViolationKind::Missing))
                .into(),
            422,
            "schema_violation",
        ),
        (
            OrchestratorError::LintBlocked(vec![]).into(),
            422,
            "lint_errors",
        ),
        (
            OrchestratorError::StageFailed {
                stage: Trigger::Generate,
                cause: FailureCause::Pipeline,
                message: "x".into(),
                gateway_code: None,
            }
            .into(),
            500,
            "stage_failed",
        ),
        (
            OrchestratorError::StageFailed {
                stage: Trigger::Evaluate,
                cause: FailureCause::Provider,
                message: "x".into(),
                gateway_code: Some("provider_timeout"),
            }
            .into(),
            502,
            "provider_failure",
        ),
        (
            StoreError::InvalidId("a/b".into()).into(),
            422,
            "invalid_id",
        ),
        (StoreError::InjectedCrash("x".into()).into(), 500, "storage"),
        (
            StoreError::Corrupt {
                path: "x".into(),
                detail: "y".into(),
            }
            .into(),
            500,
            "storage",
        ),
        (
            OrchestratorError::Store(StoreError::InvalidId("..".into())).into(),
            422,
            "invalid_id",
        ),
    ];
    for (err, status, code) in cases {
        assert_eq!((err.status.as_u16(), err.code), (status, code));
        assert!(
            ERROR_CODES.contains(&(code, status)),
            "{code} not documented"
        );
    }
}

pub async fn bearer_token_guards_everything_but_healthz() {
    let store = tempfile::tempdir().unwrap();
    let open_client = Client::new(store.path(), ToolchainConfig::default(), Some("t0ken"));
    let anonymous = Client {
        token: None,
        ..Client::new(store.path(), ToolchainConfig::default(), Some("t0ken"))
    };
    let wrong = Client {
        token: Some("nope".into()),
        ..Client::new(store.path(), ToolchainConfig::default(), Some("t0ken"))
    };
    assert_eq!(anonymous.get("/healthz").await.status, StatusCode::OK);
    for r in ROUTES.iter().filter(|r| r.path != "/healthz") {
        let path = r.path.replace("{id}", "x");
        let resp = anonymous
            .send(r.method, &path, "application/json", Vec::new())
            .await;
        assert_eq!(
            (resp.status, resp.code()),
            (StatusCode::UNAUTHORIZED, "unauthorized".into()),
            "{} {path}",
            r.method
        );
    }
    assert_eq!(
        wrong.get("/profiles").await.status,
        StatusCode::UNAUTHORIZED
    );
    assert_eq!(open_client.get("/profiles").await.status, StatusCode::OK);
}

pub async fn restart_mid_suite_loses_no_session() {
    let store = tempfile::tempdir().unwrap();
    seed(store.path());
    let body = json!({"profile_id": "weak-reader", "task_id": "add-fractions", "pack_ids": ["fractions-curriculum"]});
    let (ids, snapshots) = {
        let c = Client::new(store.path(), ToolchainConfig::default(), None);
        let mut ids = Vec::new();
        for steps in 0..6 {
            let id = c.post("/sessions", body.clone()).await.json()["id"]
                .as_str()
                .unwrap()
                .to_string();
            for _ in 0..steps {
                c.post(&format!("/sessions/{id}/advance"), json!(null))
                    .await;
            }
            ids.push(id);
        }
        c.post(
            &format!("/sessions/{}/review", ids[5]),
            json!({"verdict": "accept"}),
        )
        .await;
        let mut snaps = Vec::new();
        for id in &ids {
            snaps.push(c.get(&format!("/sessions/{id}")).await.bytes);
        }
        (ids, snaps)
    };

    let c = Client::new(store.path(), ToolchainConfig::default(), None);
    let listed = c.get("/sessions").await.json();
    assert_eq!(listed.as_array().unwrap().len(), ids.len());
    for (id, before) in ids.iter().zip(&snapshots) {
        assert_eq!(
            &c.get(&format!("/sessions/{id}")).await.bytes,
            before,
            "{id} changed across restart"
        );
    }
    let states: Vec<String> = listed
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["state"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(
        states,
        [
            "created",
            "simulated",
            "diagnosed",
            "generated",
            "evaluated",
            "accepted"
        ]
    );
    // Work resumes where it stopped.
    for id in &ids[..5] {
        let r = c
            .post(&format!("/sessions/{id}/run?wait=true"), json!(null))
            .await;
        assert_eq!(r.json()["state"], "awaiting_review", "{id}");
    }
}

pub fn openapi_lists_exactly_the_route_table() {
    let doc = openapi();
    let mut documented = BTreeSet::new();
    for (path, ops) in doc["paths"].as_object().unwrap() {
        for (method, op) in ops.as_object().unwrap() {
            documented.insert((method.to_uppercase(), path.clone()));
            assert!(op["responses"]
                .as_object()
                .unwrap()
                .keys()
                .all(|k| k.parse::<u16>().is_ok()));
        }
    }
    let table: BTreeSet<(String, String)> = ROUTES
        .iter()
        .map(|r| (r.method.to_string(), r.path.to_string()))
        .collect();
    assert_eq!(documented, table);
    let codes: Vec<&str> = doc["components"]["schemas"]["ApiError"]["properties"]["code"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(
        codes,
        ERROR_CODES.iter().map(|(c, _)| *c).collect::<Vec<_>>()
    );
}
