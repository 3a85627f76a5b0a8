//! Chat-completion requests and the per-role temperature policy.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleTag {
    Learner,
    Assessment,
    Generator,
    Evaluator,
}

impl RoleTag {
    pub const ALL: [Self; 4] = [
        Self::Learner,
        Self::Assessment,
        Self::Generator,
        Self::Evaluator,
    ];

    /// Creative roles run hot; the evaluator runs cold for consistent scoring.
    pub fn default_temperature(self) -> f64 {
        match self {
            Self::Learner | Self::Assessment | Self::Generator => 0.9,
            Self::Evaluator => 0.1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Learner => "learner",
            Self::Assessment => "assessment",
            Self::Generator => "generator",
            Self::Evaluator => "evaluator",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speaker {
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub speaker: Speaker,
    pub text: String,
}

impl ChatMessage {
    pub fn user(text: impl Into<String>) -> Self {
        Self {
            speaker: Speaker::User,
            text: text.into(),
        }
    }

    pub fn assistant(text: impl Into<String>) -> Self {
        Self {
            speaker: Speaker::Assistant,
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub role_tag: RoleTag,
    pub model_id: String,
    pub system_prompt: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Set when the temperature came from a configuration override rather
    /// than the role policy.
    #[serde(default)]
    pub temperature_override: bool,
    pub request_hash: String,
}

impl ChatRequest {
    /// Stable SHA-256 over model, system prompt, messages and temperature.
    pub fn compute_hash(
        model_id: &str,
        system_prompt: &str,
        messages: &[ChatMessage],
        temperature: f64,
    ) -> String {
        #[derive(Serialize)]
        struct Hashed<'a> {
            model_id: &'a str,
            system_prompt: &'a str,
            messages: &'a [ChatMessage],
            temperature: f64,
        }
        let canonical = serde_json::to_vec(&Hashed {
            model_id,
            system_prompt,
            messages,
            temperature,
        })
        .expect("hash input serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    /// Whether the temperature obeys the role policy or is marked as overridden.
    pub fn temperature_policy_holds(&self) -> bool {
        self.temperature_override || self.temperature == self.role_tag.default_temperature()
    }

    /// Every text that would travel to the provider, for isolation checks.
    pub fn payload_text(&self) -> String {
        let mut out = self.system_prompt.clone();
        for m in &self.messages {
            out.push('\n');
            out.push_str(&m.text);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    Live,
    Mock,
}

/// A provider reply. `text` is empty only when the provider explicitly
/// returned an empty completion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    pub latency_ms: u64,
    pub provider: ProviderKind,
    #[serde(default)]
    pub raw_meta: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestConfig {
    pub model_id: String,
    pub max_tokens: u32,
    #[serde(default)]
    pub temperature_overrides: BTreeMap<RoleTag, f64>,
}

impl Default for RequestConfig {
    fn default() -> Self {
        Self {
            model_id: String::from("gpt-oss:120b"),
            max_tokens: 4096,
            temperature_overrides: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildRequestError {
    #[error("system prompt is empty")]
    EmptySystemPrompt,
    #[error("request has no messages or an empty message")]
    EmptyMessages,
    #[error("temperature override {0} is outside 0..=2")]
    TemperatureOutOfRange(f64),
}

pub fn build_request(
    role: RoleTag,
    system_prompt: impl Into<String>,
    messages: Vec<ChatMessage>,
    config: &RequestConfig,
) -> Result<ChatRequest, BuildRequestError> {
    let system_prompt = system_prompt.into();
    if system_prompt.trim().is_empty() {
        return Err(BuildRequestError::EmptySystemPrompt);
    }
    if messages.is_empty() || messages.iter().any(|m| m.text.trim().is_empty()) {
        return Err(BuildRequestError::EmptyMessages);
    }
    let (temperature, temperature_override) = match config.temperature_overrides.get(&role) {
        Some(&t) if (0.0..=2.0).contains(&t) => (t, true),
        Some(&t) => return Err(BuildRequestError::TemperatureOutOfRange(t)),
        None => (role.default_temperature(), false),
    };
    let request_hash =
        ChatRequest::compute_hash(&config.model_id, &system_prompt, &messages, temperature);
    Ok(ChatRequest {
        role_tag: role,
        model_id: config.model_id.clone(),
        system_prompt,
        messages,
        temperature,
        max_tokens: config.max_tokens,
        temperature_override,
        request_hash,
    })
}
