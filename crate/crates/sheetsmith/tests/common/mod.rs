//! Shared fixtures and harness for the integration tests.
#![allow(dead_code)]

pub mod contract;

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use sheetsmith::core::{KnowledgePack, LearnerProfile, RoleTag, TaskItem};
use sheetsmith::gateway::{Gateway, MockProvider, Provider, ScriptedProvider};
use sheetsmith::orchestrator::{FixedClock, Orchestrator, SequentialIds};
use sheetsmith::render::ToolchainConfig;
use sheetsmith::store::{Failpoint, SessionStore};
use tempfile::TempDir;

pub const T0: &str = "2026-01-01T00:00:00Z";

pub fn t0() -> DateTime<Utc> {
    T0.parse().unwrap()
}

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .canonicalize()
        .unwrap()
}

pub fn read_json<T: DeserializeOwned>(rel: &str) -> T {
    let path = fixtures().join(rel);
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap())
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn weak_reader() -> LearnerProfile {
    read_json("profiles/weak-reader.json")
}

pub fn strong_solver() -> LearnerProfile {
    read_json("profiles/strong-solver.json")
}

pub fn fractions_task() -> TaskItem {
    read_json("tasks/add-fractions.json")
}

pub fn curriculum_pack() -> KnowledgePack {
    read_json("packs/fractions-curriculum.json")
}

pub fn reply(suite: &str, role: RoleTag) -> String {
    std::fs::read_to_string(
        fixtures()
            .join("replies")
            .join(suite)
            .join(format!("{}.txt", role.as_str())),
    )
    .unwrap()
}

pub fn suite_dir(suite: &str) -> PathBuf {
    fixtures().join("suites").join(suite)
}

pub fn worksheet(name: &str) -> String {
    std::fs::read_to_string(fixtures().join("worksheets").join(name)).unwrap()
}

/// A scripted provider loaded with one full pipeline's replies.
pub fn scripted(suite: &str) -> Arc<ScriptedProvider> {
    let p = ScriptedProvider::new();
    for role in RoleTag::ALL {
        p.push(role, reply(suite, role));
    }
    Arc::new(p)
}

pub fn mock(suite: &str) -> Arc<MockProvider> {
    Arc::new(MockProvider::new(suite_dir(suite)))
}

/// A store seeded with every fixture input, plus an orchestrator on top.
pub struct Harness {
    pub dir: TempDir,
    pub orch: Orchestrator,
}

impl Harness {
    pub fn new(provider: Arc<dyn Provider>) -> Self {
        Self::with(provider, ToolchainConfig::default(), None)
    }

    pub fn with(
        provider: Arc<dyn Provider>,
        toolchain: ToolchainConfig,
        failpoint: Option<Arc<Failpoint>>,
    ) -> Self {
        let dir = tempfile::tempdir().unwrap();
        seed(dir.path());
        let orch = open(dir.path(), provider, toolchain, failpoint);
        Self { dir, orch }
    }

    /// Creates a session for `profile` on the fractions task with the curriculum pack.
    pub fn start(&self, profile: &str) -> String {
        let s = self
            .orch
            .create_session(
                &profile.into(),
                &"add-fractions".into(),
                Some(vec![curriculum_pack().id]),
            )
            .unwrap();
        s.id.0
    }
}

pub fn seed(root: &Path) {
    let store = SessionStore::open(root).unwrap();
    store.put(&weak_reader()).unwrap();
    store.put(&strong_solver()).unwrap();
    store.put(&fractions_task()).unwrap();
    store.put(&curriculum_pack()).unwrap();
}

pub fn open(
    root: &Path,
    provider: Arc<dyn Provider>,
    toolchain: ToolchainConfig,
    failpoint: Option<Arc<Failpoint>>,
) -> Orchestrator {
    let mut store = SessionStore::open(root).unwrap();
    if let Some(fp) = failpoint {
        store = store.with_failpoint(fp);
    }
    Orchestrator::builder(store, Gateway::new(provider))
        .toolchain(toolchain)
        .clock(FixedClock(t0()))
        .ids(SequentialIds::default())
        .build()
}

/// Writes an executable shell script and returns its path.
#[cfg(unix)]
pub fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
    use std::os::unix::fs::PermissionsExt;
    let path = dir.join(name);
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

/// Serves canned responses on a local port; records every request body.
pub struct Stub {
    pub url: String,
    pub hits: Arc<AtomicUsize>,
    /// (authorization header, body) per request.
    pub bodies: Arc<Mutex<Vec<(String, String)>>>,
}

pub fn stub(respond: impl Fn(usize, &str) -> (u16, String, Duration) + Send + 'static) -> Stub {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!(
        "http://{}/v1/chat/completions",
        listener.local_addr().unwrap()
    );
    let hits = Arc::new(AtomicUsize::new(0));
    let bodies = Arc::new(Mutex::new(Vec::new()));
    let (h, b) = (hits.clone(), bodies.clone());
    std::thread::spawn(move || {
        for conn in listener.incoming() {
            let Ok(mut conn) = conn else { return };
            let mut reader = BufReader::new(conn.try_clone().unwrap());
            let mut len = 0;
            let mut auth = String::new();
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                    break;
                }
                let lower = line.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if lower.starts_with("authorization:") {
                    auth = line["authorization:".len()..].trim().to_string();
                }
            }
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            let body = String::from_utf8(body).unwrap();
            let n = h.fetch_add(1, Ordering::SeqCst);
            let (status, text, delay) = respond(n, &body);
            b.lock().unwrap().push((auth, body));
            std::thread::sleep(delay);
            let _ = write!(
                conn,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}",
                text.len()
            );
        }
    });
    Stub { url, hits, bodies }
}
