//! Queued replies per role, for tests and for authoring demo fixtures.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Mutex;

use serde_json::Map;
use sheetsmith_core::{ChatRequest, ChatResponse, ProviderKind, RoleTag};

use super::{pretty_request, GatewayError, Provider};

/// Answers each request with the next queued reply for its role.
/// An empty queue answers `NoFixture`.
#[derive(Default)]
pub struct ScriptedProvider {
    queues: Mutex<BTreeMap<RoleTag, VecDeque<Result<String, GatewayError>>>>,
}

impl ScriptedProvider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&self, role: RoleTag, text: impl Into<String>) -> &Self {
        self.queues
            .lock()
            .expect("script lock")
            .entry(role)
            .or_default()
            .push_back(Ok(text.into()));
        self
    }

    pub fn push_error(&self, role: RoleTag, err: GatewayError) -> &Self {
        self.queues
            .lock()
            .expect("script lock")
            .entry(role)
            .or_default()
            .push_back(Err(err));
        self
    }

    pub fn remaining(&self, role: RoleTag) -> usize {
        self.queues
            .lock()
            .expect("script lock")
            .get(&role)
            .map_or(0, VecDeque::len)
    }
}

impl Provider for ScriptedProvider {
    fn kind(&self) -> ProviderKind {
        ProviderKind::Mock
    }

    fn complete(&self, _session: &str, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let next = self
            .queues
            .lock()
            .expect("script lock")
            .get_mut(&req.role_tag)
            .and_then(VecDeque::pop_front);
        match next {
            Some(Ok(text)) => Ok(ChatResponse {
                text,
                latency_ms: 0,
                provider: ProviderKind::Mock,
                raw_meta: Map::new(),
            }),
            Some(Err(e)) => Err(e),
            None => Err(GatewayError::NoFixture {
                hash: req.request_hash.clone(),
                request: pretty_request(req),
            }),
        }
    }
}
