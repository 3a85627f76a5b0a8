//! OpenAI-compatible chat-completions client (Ollama, vLLM, hosted APIs).

use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sheetsmith_core::{ChatRequest, ChatResponse, ProviderKind, Speaker};

use super::{GatewayError, Provider};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LiveConfig {
    /// Full chat-completions URL, e.g. `http://localhost:11434/v1/chat/completions`.
    pub endpoint: String,
    pub timeout_s: u64,
    /// Extra attempts after the first for transport faults, 429 and 5xx.
    pub retries: u32,
    pub backoff_ms: u64,
    /// Environment variable holding a bearer key, if the endpoint wants one.
    pub api_key_env: Option<String>,
}

impl Default for LiveConfig {
    fn default() -> Self {
        Self {
            endpoint: "http://localhost:11434/v1/chat/completions".into(),
            timeout_s: 120,
            retries: 3,
            backoff_ms: 500,
            api_key_env: None,
        }
    }
}

pub struct LiveProvider {
    config: LiveConfig,
    agent: ureq::Agent,
    api_key: Option<String>,
}

enum Attempt {
    Done(ChatResponse),
    Retry(GatewayError),
    Fail(GatewayError),
}

impl LiveProvider {
    pub fn new(config: LiveConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_s.max(1))))
            .http_status_as_error(false)
            .build()
            .into();
        let api_key = config
            .api_key_env
            .as_deref()
            .and_then(|v| std::env::var(v).ok())
            .filter(|k| !k.is_empty());
        Self {
            config,
            agent,
            api_key,
        }
    }

    pub fn config(&self) -> &LiveConfig {
        &self.config
    }

    fn body(req: &ChatRequest) -> String {
        let mut messages = vec![json!({"role": "system", "content": req.system_prompt})];
        messages.extend(req.messages.iter().map(|m| {
            let role = match m.speaker {
                Speaker::User => "user",
                Speaker::Assistant => "assistant",
            };
            json!({"role": role, "content": m.text})
        }));
        json!({
            "model": req.model_id,
            "messages": messages,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
            "stream": false,
        })
        .to_string()
    }

    fn attempt(&self, body: &str) -> Attempt {
        let started = Instant::now();
        let mut call = self
            .agent
            .post(&self.config.endpoint)
            .header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            call = call.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = match call.send(body) {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => {
                return Attempt::Retry(GatewayError::Timeout {
                    seconds: self.config.timeout_s,
                })
            }
            Err(e) => return Attempt::Retry(GatewayError::Transport(e.to_string())),
        };
        let status = resp.status().as_u16();
        let text = match resp.body_mut().read_to_string() {
            Ok(t) => t,
            Err(ureq::Error::Timeout(_)) => {
                return Attempt::Retry(GatewayError::Timeout {
                    seconds: self.config.timeout_s,
                })
            }
            Err(e) => return Attempt::Retry(GatewayError::Transport(e.to_string())),
        };
        if !(200..300).contains(&status) {
            let refusal = GatewayError::ProviderRefusal { status, body: text };
            return if status == 429 || status >= 500 {
                Attempt::Retry(refusal)
            } else {
                Attempt::Fail(refusal)
            };
        }
        match parse_completion(&text) {
            Ok((content, raw_meta)) => Attempt::Done(ChatResponse {
                text: content,
                latency_ms: started.elapsed().as_millis() as u64,
                provider: ProviderKind::Live,
                raw_meta,
            }),
            Err(detail) => Attempt::Fail(GatewayError::Transport(format!(
                "unreadable completion body: {detail}"
            ))),
        }
    }
}

impl Provider for LiveProvider {
    fn kind(&self) -> ProviderKind {
        ProviderKind::Live
    }

    fn complete(&self, _session: &str, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let body = Self::body(req);
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        let mut attempt = 0;
        loop {
            match self.attempt(&body) {
                Attempt::Done(resp) => return Ok(resp),
                Attempt::Fail(e) => return Err(e),
                Attempt::Retry(e) if attempt >= self.config.retries => return Err(e),
                Attempt::Retry(e) => {
                    tracing::warn!(attempt, error = %e, "retrying chat completion");
                    thread::sleep(delay);
                    delay = delay.saturating_mul(2);
                    attempt += 1;
                }
            }
        }
    }
}

/// `choices[0].message.content` plus model, usage, finish reason and id.
fn parse_completion(body: &str) -> Result<(String, Map<String, Value>), String> {
    let v: Value = serde_json::from_str(body).map_err(|e| e.to_string())?;
    let choice = v.pointer("/choices/0").ok_or("no choices[0]")?;
    let content = match choice.pointer("/message/content") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Null) => String::new(),
        _ => return Err("choices[0].message.content missing".into()),
    };
    let mut meta = Map::new();
    for key in ["id", "model", "usage"] {
        if let Some(x) = v.get(key) {
            meta.insert(key.into(), x.clone());
        }
    }
    if let Some(x) = choice.get("finish_reason") {
        meta.insert("finish_reason".into(), x.clone());
    }
    Ok((content, meta))
}
