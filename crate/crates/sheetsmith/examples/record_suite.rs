//! Rebuilds a checked-in fixture suite from canned replies.
//!
//! `cargo run -p sheetsmith --example record_suite -- dyslexia`
//!
//! Replies come from `fixtures/replies/<suite>/<role>.txt` and the suite is
//! written to `fixtures/suites/<suite>/`, replacing what was there.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use sheetsmith::core::{KnowledgePack, LearnerProfile, RoleTag, TaskItem};
use sheetsmith::gateway::{FixtureRecorder, Gateway, ScriptedProvider};
use sheetsmith::orchestrator::{FixedClock, Orchestrator, SequentialIds};
use sheetsmith::store::SessionStore;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> T {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn main() {
    let suite = std::env::args()
        .nth(1)
        .expect("usage: record_suite <dyslexia|standard>");
    let profile_file = match suite.as_str() {
        "dyslexia" => "weak-reader.json",
        "standard" => "strong-solver.json",
        other => panic!("unknown suite {other}"),
    };
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let profile: LearnerProfile = read_json(&fixtures.join("profiles").join(profile_file));
    let task: TaskItem = read_json(&fixtures.join("tasks/add-fractions.json"));
    let pack: KnowledgePack = read_json(&fixtures.join("packs/fractions-curriculum.json"));

    let scripted = ScriptedProvider::new();
    for role in RoleTag::ALL {
        let path = fixtures
            .join("replies")
            .join(&suite)
            .join(format!("{}.txt", role.as_str()));
        scripted.push(
            role,
            std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display())),
        );
    }
    let out = fixtures.join("suites").join(&suite);
    if out.exists() {
        std::fs::remove_dir_all(&out).expect("clear old suite");
    }
    let gateway = Gateway::new(Arc::new(scripted))
        .with_recorder(FixtureRecorder::new(&out).expect("suite dir"));

    let scratch = tempfile::tempdir().expect("tempdir");
    let store = SessionStore::open(scratch.path()).expect("store");
    store.put(&profile).expect("profile");
    store.put(&task).expect("task");
    store.put(&pack).expect("pack");
    let orch = Orchestrator::builder(store, gateway)
        .clock(FixedClock("2026-01-01T00:00:00Z".parse().unwrap()))
        .ids(SequentialIds::default())
        .build();
    let session = orch
        .create_session(&profile.id, &task.id, Some(vec![pack.id]))
        .expect("session");
    let done = orch.run_to_review(session.id.as_str()).expect("pipeline");
    println!(
        "{}: {} records, final state {}",
        out.display(),
        orch.gateway().transcript().len(),
        done.state.as_str()
    );
}
