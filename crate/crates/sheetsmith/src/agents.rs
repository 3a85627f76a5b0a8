//! The four agents: prompt assembly, one gateway call each, reply parsing,
//! and the schema repair loop for the two JSON-speaking roles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sheetsmith_core::chat::BuildRequestError;
use sheetsmith_core::learner::{affect_markers, classify_completion, CompletionPhrases};
use sheetsmith_core::prompt::RenderedPrompt;
use sheetsmith_core::rubric::{anchor_table, parse_evaluation};
use sheetsmith_core::{
    build_request, parse_diagnosis, serialize_diagnosis, ChatMessage, Diagnosis,
    GenerationDirectives, KnowledgePack, LearnerProfile, RepairPolicy, RequestConfig, RoleTag,
    RubricEvaluation, SchemaViolation, TaskItem, TemplateError, TemplateSet, ThoughtProtocol,
};

use crate::gateway::{GatewayError, SessionGateway};

pub const DEFAULT_PACK_BUDGET_CHARS: usize = 8_000;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("{role} agent returned an empty reply")]
    EmptyReply { role: &'static str },
    #[error("diagnosis still invalid after {attempts} attempts: {}", last_violation(.violations))]
    DiagnosisUnrecoverable {
        attempts: u32,
        violations: Vec<SchemaViolation>,
    },
    #[error("evaluation still invalid after {attempts} attempts: {}", last_violation(.violations))]
    EvaluationUnrecoverable {
        attempts: u32,
        violations: Vec<SchemaViolation>,
    },
    #[error("knowledge packs total {total} characters, over the budget of {budget}")]
    ContextBudgetExceeded { total: usize, budget: usize },
    #[error("{0} must not be empty")]
    EmptyInput(&'static str),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Request(#[from] BuildRequestError),
}

fn last_violation(v: &[SchemaViolation]) -> String {
    v.last().map(ToString::to_string).unwrap_or_default()
}

enum RepairFailure {
    Call(AgentError),
    Exhausted {
        attempts: u32,
        violations: Vec<SchemaViolation>,
    },
}

/// A parsed stage result and the number of repair re-prompts it took.
#[derive(Debug, Clone, PartialEq)]
pub struct Repaired<T> {
    pub value: T,
    pub retries: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    #[serde(flatten)]
    pub request: RequestConfig,
    pub repair: RepairPolicy,
    pub completion_phrases: CompletionPhrases,
    pub pack_budget_chars: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            request: RequestConfig::default(),
            repair: RepairPolicy::default(),
            completion_phrases: CompletionPhrases::default(),
            pack_budget_chars: DEFAULT_PACK_BUDGET_CHARS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AgentSuite {
    pub templates: TemplateSet,
    pub config: AgentConfig,
}

impl Default for AgentSuite {
    fn default() -> Self {
        Self::new(TemplateSet::builtin(), AgentConfig::default())
    }
}

impl AgentSuite {
    pub fn new(templates: TemplateSet, config: AgentConfig) -> Self {
        Self { templates, config }
    }

    fn render(
        &self,
        role: RoleTag,
        pairs: &[(&str, &str)],
    ) -> Result<RenderedPrompt, TemplateError> {
        let values: BTreeMap<&str, &str> = pairs.iter().copied().collect();
        self.templates.get(role).render(&values)
    }

    fn call(
        &self,
        gw: &SessionGateway,
        role: RoleTag,
        system: &str,
        messages: Vec<ChatMessage>,
    ) -> Result<String, AgentError> {
        let req = build_request(role, system, messages, &self.config.request)?;
        if req.temperature_override {
            tracing::info!(
                role = role.as_str(),
                temperature = req.temperature,
                "temperature override in effect"
            );
        }
        Ok(gw.complete(&req)?.text)
    }

    /// Calls until `parse` accepts the reply, feeding each violation list
    /// back as a follow-up message. Errors with every violation seen once
    /// the attempt budget is spent.
    fn with_repair<T>(
        &self,
        gw: &SessionGateway,
        role: RoleTag,
        prompt: RenderedPrompt,
        parse: impl Fn(&str) -> Result<T, SchemaViolation>,
    ) -> Result<Repaired<T>, RepairFailure> {
        let policy = &self.config.repair;
        let mut messages = vec![ChatMessage::user(prompt.user)];
        let mut violations = Vec::new();
        for attempt in 0..policy.attempts() {
            let reply = self
                .call(gw, role, &prompt.system, messages.clone())
                .map_err(RepairFailure::Call)?;
            match parse(&reply) {
                Ok(value) => {
                    return Ok(Repaired {
                        value,
                        retries: attempt,
                    })
                }
                Err(v) => {
                    tracing::warn!(role = role.as_str(), attempt, violation = %v, "reply failed schema check");
                    messages.push(ChatMessage::assistant(if reply.trim().is_empty() {
                        "(empty reply)".into()
                    } else {
                        reply
                    }));
                    messages.push(ChatMessage::user(policy.repair_message(&v)));
                    violations.push(v);
                }
            }
        }
        Err(RepairFailure::Exhausted {
            attempts: policy.attempts(),
            violations,
        })
    }

    pub fn run_learner(
        &self,
        profile: &LearnerProfile,
        task: &TaskItem,
        gw: &SessionGateway,
    ) -> Result<ThoughtProtocol, AgentError> {
        let errors = if profile.typical_errors.is_empty() {
            String::new()
        } else {
            format!(
                " Typical errors you make: {}.",
                profile.typical_errors.join("; ")
            )
        };
        let prompt = self.render(
            RoleTag::Learner,
            &[
                ("persona_text", &profile.persona_text),
                ("typical_errors", &errors),
                ("task_statement", &task.statement),
            ],
        )?;
        let text = self.call(
            gw,
            RoleTag::Learner,
            &prompt.system,
            vec![ChatMessage::user(prompt.user)],
        )?;
        if text.trim().is_empty() {
            return Err(AgentError::EmptyReply { role: "learner" });
        }
        Ok(ThoughtProtocol {
            profile_id: profile.id.clone(),
            task_id: task.id.clone(),
            completion: classify_completion(&text, &self.config.completion_phrases),
            affect_markers: affect_markers(&text),
            raw_text: text,
        })
    }

    pub fn run_assessment(
        &self,
        task: &TaskItem,
        protocol: &ThoughtProtocol,
        profile: &LearnerProfile,
        gw: &SessionGateway,
    ) -> Result<Repaired<Diagnosis>, AgentError> {
        let prompt = self.render(
            RoleTag::Assessment,
            &[
                ("task_statement", &task.statement),
                ("protocol", &protocol.raw_text),
                ("persona_text", &profile.persona_text),
            ],
        )?;
        self.with_repair(gw, RoleTag::Assessment, prompt, parse_diagnosis)
            .map_err(|f| match f {
                RepairFailure::Call(e) => e,
                RepairFailure::Exhausted {
                    attempts,
                    violations,
                } => AgentError::DiagnosisUnrecoverable {
                    attempts,
                    violations,
                },
            })
    }

    /// Returns the worksheet LaTeX with any code fence removed. Validation
    /// is the worksheet engine's job.
    pub fn run_generator(
        &self,
        task: &TaskItem,
        protocol: &ThoughtProtocol,
        diagnosis: &Diagnosis,
        directives: &GenerationDirectives,
        packs: &[KnowledgePack],
        gw: &SessionGateway,
    ) -> Result<String, AgentError> {
        let total: usize = packs.iter().map(|p| p.body.chars().count()).sum();
        if total > self.config.pack_budget_chars {
            return Err(AgentError::ContextBudgetExceeded {
                total,
                budget: self.config.pack_budget_chars,
            });
        }
        let knowledge = if packs.is_empty() {
            "(none provided)".to_string()
        } else {
            packs
                .iter()
                .map(|p| format!("## {}\n{}", p.title, p.body))
                .collect::<Vec<_>>()
                .join("\n\n")
        };
        let diagnosis_json = serialize_diagnosis(diagnosis);
        let summary = directives.summary();
        let prompt = self.render(
            RoleTag::Generator,
            &[
                ("knowledge_packs", &knowledge),
                ("task_statement", &task.statement),
                ("protocol", &protocol.raw_text),
                ("diagnosis_json", &diagnosis_json),
                ("directives", &summary),
            ],
        )?;
        let text = self.call(
            gw,
            RoleTag::Generator,
            &prompt.system,
            vec![ChatMessage::user(prompt.user)],
        )?;
        if text.trim().is_empty() {
            return Err(AgentError::EmptyReply { role: "generator" });
        }
        Ok(strip_fences(&text).to_string())
    }

    /// Sees only the worksheet and the persona.
    pub fn run_evaluator(
        &self,
        worksheet_latex: &str,
        persona_text: &str,
        gw: &SessionGateway,
    ) -> Result<Repaired<RubricEvaluation>, AgentError> {
        if worksheet_latex.trim().is_empty() {
            return Err(AgentError::EmptyInput("worksheet_latex"));
        }
        if persona_text.trim().is_empty() {
            return Err(AgentError::EmptyInput("persona_text"));
        }
        let rubric = anchor_table();
        let prompt = self.render(
            RoleTag::Evaluator,
            &[
                ("rubric", &rubric),
                ("persona_text", persona_text),
                ("worksheet_latex", worksheet_latex),
            ],
        )?;
        self.with_repair(gw, RoleTag::Evaluator, prompt, parse_evaluation)
            .map_err(|f| match f {
                RepairFailure::Call(e) => e,
                RepairFailure::Exhausted {
                    attempts,
                    violations,
                } => AgentError::EvaluationUnrecoverable {
                    attempts,
                    violations,
                },
            })
    }
}

/// Inner text of the first fenced block, or the reply unchanged.
pub fn strip_fences(text: &str) -> &str {
    let Some(open) = text.find("```") else {
        return text;
    };
    let after_tag = match text[open + 3..].find('\n') {
        Some(nl) => open + 3 + nl + 1,
        None => return text,
    };
    match text[after_tag..].find("```") {
        Some(close) => text[after_tag..after_tag + close].trim_end_matches(['\n', '\r']),
        None => text,
    }
}
