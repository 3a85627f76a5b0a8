//! TOML configuration shared by the CLI and the HTTP service.
//!
//! ```toml
//! store_root = "store"
//!
//! [provider.mock]            # or [provider.live], never both
//! fixtures = "fixtures/demo"
//!
//! [model]
//! model_id = "gpt-oss:120b"
//! max_tokens = 4096
//!
//! [toolchain]
//! latex_compiler_cmd = ["pdflatex", "-no-shell-escape", "-interaction=nonstopmode", "-halt-on-error", "-output-directory", "{outdir}", "{input}"]
//! docx_converter_cmd = ["pandoc", "{input}", "-o", "{output}"]
//!
//! [prompts]
//! dir = "prompts"
//!
//! [pipeline]
//! max_attempts = 3
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::Deserialize;
use sheetsmith_core::{
    LintOptions, PromptTemplate, RepairPolicy, RequestConfig, RoleTag, TemplateError, TemplateSet,
};

use crate::agents::{AgentConfig, AgentSuite, DEFAULT_PACK_BUDGET_CHARS};
use crate::gateway::{
    FixtureRecorder, Gateway, GatewayError, LiveConfig, LiveProvider, MockProvider, Provider,
};
use crate::orchestrator::{FixedClock, Orchestrator, SequentialIds};
use crate::render::ToolchainConfig;
use crate::store::{SessionStore, StoreError};

pub const CONFIG_ENV: &str = "SHEETSMITH_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("config: {0}")]
    Invalid(String),
    #[error("prompt template {path}: {source}")]
    Template {
        path: PathBuf,
        source: TemplateError,
    },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockSection {
    pub fixtures: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProviderSection {
    mock: Option<MockSection>,
    live: Option<LiveConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProviderConfig {
    Mock(MockSection),
    Live(LiveConfig),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptSection {
    /// Directory whose `learner.txt`, `assessment.txt`, `generator.txt` and
    /// `evaluator.txt` replace the built-in templates when present.
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub max_attempts: u32,
    pub pack_budget_chars: usize,
    pub max_avg_sentence_words: f64,
    pub one_page_word_budget: usize,
    /// Mirror every provider call to `<store_root>/transcripts/<session>.jsonl`.
    pub transcripts: bool,
    /// Stamp every timestamp with this instant instead of the wall clock.
    pub fixed_time: Option<DateTime<Utc>>,
    /// Session ids `s-000001`, `s-000002`, ... instead of random UUIDs.
    pub sequential_ids: bool,
}

impl Default for PipelineSection {
    fn default() -> Self {
        let lint = LintOptions::default();
        Self {
            max_attempts: RepairPolicy::default().max_attempts,
            pack_budget_chars: DEFAULT_PACK_BUDGET_CHARS,
            max_avg_sentence_words: lint.max_avg_sentence_words,
            one_page_word_budget: lint.one_page_word_budget,
            transcripts: true,
            fixed_time: None,
            sequential_ids: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub model_id: String,
    pub max_tokens: u32,
    pub temperature_overrides: BTreeMap<RoleTag, f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        let r = RequestConfig::default();
        Self {
            model_id: r.model_id,
            max_tokens: r.max_tokens,
            temperature_overrides: r.temperature_overrides,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    store_root: PathBuf,
    #[serde(default)]
    provider: ProviderSection,
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    toolchain: ToolchainConfig,
    #[serde(default)]
    prompts: PromptSection,
    #[serde(default)]
    pipeline: PipelineSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub store_root: PathBuf,
    pub provider: ProviderConfig,
    pub model: ModelSection,
    pub toolchain: ToolchainConfig,
    pub prompts: PromptSection,
    pub pipeline: PipelineSection,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_owned()
    } else {
        base.join(p)
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.into(),
            source,
        })?;
        let base = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse {
                path: path.into(),
                source,
            },
            other => other,
        })
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: PathBuf::from("<inline>"),
            source,
        })?;
        let provider = match (raw.provider.mock, raw.provider.live) {
            (Some(mut m), None) => {
                m.fixtures = resolve(base, &m.fixtures);
                ProviderConfig::Mock(m)
            }
            (None, Some(l)) => {
                if !l.endpoint.starts_with("http://") && !l.endpoint.starts_with("https://") {
                    return Err(ConfigError::Invalid(format!(
                        "provider.live.endpoint {:?} is not an http(s) URL",
                        l.endpoint
                    )));
                }
                ProviderConfig::Live(l)
            }
            (None, None) => {
                return Err(ConfigError::Invalid(
                    "configure one of [provider.mock] or [provider.live]".into(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(ConfigError::Invalid(
                    "[provider.mock] and [provider.live] are mutually exclusive".into(),
                ))
            }
        };
        if raw.pipeline.max_attempts == 0 {
            return Err(ConfigError::Invalid(
                "pipeline.max_attempts must be at least 1".into(),
            ));
        }
        for (role, t) in &raw.model.temperature_overrides {
            if !(0.0..=2.0).contains(t) {
                return Err(ConfigError::Invalid(format!(
                    "temperature override {t} for {} is outside 0..=2",
                    role.as_str()
                )));
            }
        }
        let mut prompts = raw.prompts;
        prompts.dir = prompts.dir.map(|d| resolve(base, &d));
        Ok(Self {
            store_root: resolve(base, &raw.store_root),
            provider,
            model: raw.model,
            toolchain: raw.toolchain,
            prompts,
            pipeline: raw.pipeline,
        })
    }

    /// Built-in templates with any file from the prompt directory swapped in.
    pub fn templates(&self) -> Result<TemplateSet, ConfigError> {
        let mut set = TemplateSet::builtin();
        let Some(dir) = &self.prompts.dir else {
            return Ok(set);
        };
        for role in RoleTag::ALL {
            let path = dir.join(TemplateSet::file_name(role));
            if !path.exists() {
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Read {
                path: path.clone(),
                source,
            })?;
            *set.get_mut(role) = PromptTemplate::parse(role, &text)
                .map_err(|source| ConfigError::Template { path, source })?;
        }
        Ok(set)
    }

    pub fn agent_config(&self) -> AgentConfig {
        AgentConfig {
            request: RequestConfig {
                model_id: self.model.model_id.clone(),
                max_tokens: self.model.max_tokens,
                temperature_overrides: self.model.temperature_overrides.clone(),
            },
            repair: RepairPolicy::new(self.pipeline.max_attempts),
            pack_budget_chars: self.pipeline.pack_budget_chars,
            ..AgentConfig::default()
        }
    }

    pub fn lint_options(&self) -> LintOptions {
        LintOptions {
            max_avg_sentence_words: self.pipeline.max_avg_sentence_words,
            one_page_word_budget: self.pipeline.one_page_word_budget,
            page_count: None,
        }
    }

    pub fn provider(&self) -> Arc<dyn Provider> {
        match &self.provider {
            ProviderConfig::Mock(m) => Arc::new(MockProvider::new(&m.fixtures)),
            ProviderConfig::Live(l) => Arc::new(LiveProvider::new(l.clone())),
        }
    }

    /// Provider-backed gateway; records fixtures into `record_into` if given.
    pub fn gateway(
        &self,
        provider: Arc<dyn Provider>,
        record_into: Option<&Path>,
    ) -> Result<Gateway, ConfigError> {
        let mut gw = Gateway::new(provider);
        if self.pipeline.transcripts {
            gw = gw.with_transcript_dir(self.store_root.join("transcripts"));
        }
        if let Some(dir) = record_into {
            gw = gw.with_recorder(FixtureRecorder::new(dir)?);
        }
        Ok(gw)
    }

    pub fn orchestrator(&self, gateway: Gateway) -> Result<Orchestrator, ConfigError> {
        let store = SessionStore::open(&self.store_root)?;
        let mut b = Orchestrator::builder(store, gateway)
            .agents(AgentSuite::new(self.templates()?, self.agent_config()))
            .toolchain(self.toolchain.clone())
            .lint_options(self.lint_options());
        if let Some(t) = self.pipeline.fixed_time {
            b = b.clock(FixedClock(t));
        }
        if self.pipeline.sequential_ids {
            b = b.ids(SequentialIds::default());
        }
        Ok(b.build())
    }
}
