//! Chat-completion access behind one interface.
//!
//! A [`Provider`] answers a [`ChatRequest`]: [`LiveProvider`] talks to an
//! OpenAI-compatible HTTP endpoint, [`MockProvider`] replays fixture files
//! keyed by request hash, and [`ScriptedProvider`] hands out queued replies
//! per role for tests and demos. [`Gateway`] wraps a provider, appends every
//! call to a [`TranscriptLog`] and can record fixtures as it goes.

mod live;
mod mock;
mod scripted;
mod transcript;

use std::path::PathBuf;
use std::sync::Arc;

use sheetsmith_core::{ChatRequest, ChatResponse, ProviderKind};

pub use live::{LiveConfig, LiveProvider};
pub use mock::{fixture_file_name, FixtureRecord, FixtureRecorder, FixtureSet, MockProvider};
pub use scripted::ScriptedProvider;
pub use transcript::{TranscriptEntry, TranscriptLog, TranscriptOutcome};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GatewayError {
    #[error("provider timed out after {seconds}s")]
    Timeout { seconds: u64 },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("no fixture for request hash {hash}\n{request}")]
    NoFixture {
        hash: String,
        /// Pretty-printed request, ready to paste into a fixture file.
        request: String,
    },
    #[error("provider refused with HTTP {status}: {body}")]
    ProviderRefusal { status: u16, body: String },
    #[error("fixture storage: {0}")]
    Storage(String),
}

impl GatewayError {
    /// Stable machine code used by the API and CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Self::Timeout { .. } => "provider_timeout",
            Self::Transport(_) => "provider_transport",
            Self::NoFixture { .. } => "no_fixture",
            Self::ProviderRefusal { .. } => "provider_refusal",
            Self::Storage(_) => "fixture_storage",
        }
    }
}

/// Something that can answer a chat request.
///
/// `session` scopes per-session state such as the mock replay cursor.
pub trait Provider: Send + Sync {
    fn kind(&self) -> ProviderKind;
    fn complete(&self, session: &str, req: &ChatRequest) -> Result<ChatResponse, GatewayError>;
}

/// Provider plus transcript log and optional fixture recorder.
#[derive(Clone)]
pub struct Gateway {
    provider: Arc<dyn Provider>,
    log: Arc<TranscriptLog>,
    recorder: Option<Arc<FixtureRecorder>>,
}

impl Gateway {
    pub fn new(provider: Arc<dyn Provider>) -> Self {
        Self {
            provider,
            log: Arc::new(TranscriptLog::in_memory()),
            recorder: None,
        }
    }

    /// Also append each call to `dir/<session>.jsonl`.
    pub fn with_transcript_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.log = Arc::new(TranscriptLog::with_dir(dir.into()));
        self
    }

    /// Write a fixture record for every successful call.
    pub fn with_recorder(mut self, recorder: FixtureRecorder) -> Self {
        self.recorder = Some(Arc::new(recorder));
        self
    }

    pub fn provider_kind(&self) -> ProviderKind {
        self.provider.kind()
    }

    pub fn transcript(&self) -> &TranscriptLog {
        &self.log
    }

    pub fn for_session(&self, session: impl Into<String>) -> SessionGateway {
        SessionGateway {
            gateway: self.clone(),
            session: session.into(),
        }
    }

    pub fn complete(&self, session: &str, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let result = self.provider.complete(session, req);
        let result = match (result, &self.recorder) {
            (Ok(resp), Some(rec)) => rec.record(req, &resp).map(|_| resp),
            (other, _) => other,
        };
        self.log.append(session, req, &result);
        result
    }
}

/// A gateway bound to one session tag.
#[derive(Clone)]
pub struct SessionGateway {
    gateway: Gateway,
    session: String,
}

impl SessionGateway {
    pub fn session(&self) -> &str {
        &self.session
    }

    pub fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        self.gateway.complete(&self.session, req)
    }
}

/// Pretty JSON of a request for error messages and fixture authoring.
pub(crate) fn pretty_request(req: &ChatRequest) -> String {
    serde_json::to_string_pretty(req).unwrap_or_else(|_| format!("{req:?}"))
}
