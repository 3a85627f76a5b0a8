//! Append-only log of every provider call.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sheetsmith_core::{ChatRequest, ChatResponse, RoleTag};

use super::GatewayError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TranscriptOutcome {
    Ok { response: ChatResponse },
    Error { code: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    /// Position in the log, from 0.
    pub seq: u64,
    pub session: String,
    pub request: ChatRequest,
    pub outcome: TranscriptOutcome,
}

impl TranscriptEntry {
    pub fn response_text(&self) -> Option<&str> {
        match &self.outcome {
            TranscriptOutcome::Ok { response } => Some(&response.text),
            TranscriptOutcome::Error { .. } => None,
        }
    }
}

/// In-memory log, optionally mirrored to `<dir>/<session>.jsonl`.
/// Appends are serialized by a mutex.
#[derive(Debug, Default)]
pub struct TranscriptLog {
    entries: Mutex<Vec<TranscriptEntry>>,
    dir: Option<PathBuf>,
}

impl TranscriptLog {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: PathBuf) -> Self {
        Self {
            entries: Mutex::default(),
            dir: Some(dir),
        }
    }

    pub fn append(
        &self,
        session: &str,
        req: &ChatRequest,
        result: &Result<ChatResponse, GatewayError>,
    ) {
        let outcome = match result {
            Ok(response) => TranscriptOutcome::Ok {
                response: response.clone(),
            },
            Err(e) => TranscriptOutcome::Error {
                code: e.code().into(),
                message: e.to_string(),
            },
        };
        let mut entries = self.entries.lock().expect("transcript lock");
        let entry = TranscriptEntry {
            seq: entries.len() as u64,
            session: session.into(),
            request: req.clone(),
            outcome,
        };
        if let Some(dir) = &self.dir {
            // The mirror is best effort; the in-memory log stays authoritative.
            if let Err(e) = append_line(dir, session, &entry) {
                tracing::warn!(error = %e, "could not mirror transcript entry");
            }
        }
        entries.push(entry);
    }

    pub fn entries(&self) -> Vec<TranscriptEntry> {
        self.entries.lock().expect("transcript lock").clone()
    }

    pub fn for_session(&self, session: &str) -> Vec<TranscriptEntry> {
        self.entries()
            .into_iter()
            .filter(|e| e.session == session)
            .collect()
    }

    /// Provider calls made for `role` within `session`.
    pub fn calls(&self, session: &str, role: RoleTag) -> usize {
        self.entries
            .lock()
            .expect("transcript lock")
            .iter()
            .filter(|e| e.session == session && e.request.role_tag == role)
            .count()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("transcript lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn append_line(dir: &PathBuf, session: &str, entry: &TranscriptEntry) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join(format!("{session}.jsonl")))?;
    let mut line = serde_json::to_vec(entry).map_err(std::io::Error::other)?;
    line.push(b'\n');
    f.write_all(&line)
}
