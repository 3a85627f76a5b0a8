//! Pure core of the worksheet pipeline.
//!
//! Everything in this crate is deterministic and free of I/O: the domain
//! model and its canonical JSON forms, the diagnosis and rubric contracts,
//! the diagnosis-to-directives rules, prompt templates, chat request
//! construction, the session state machine table, and the LaTeX lexer,
//! sanitizer and accessibility linter.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod chat;
pub mod diagnosis;
pub mod directives;
pub mod json;
pub mod latex;
pub mod learner;
pub mod machine;
pub mod model;
pub mod prompt;
pub mod repair;
pub mod rubric;
pub mod violation;

pub use chat::{
    build_request, ChatMessage, ChatRequest, ChatResponse, ProviderKind, RequestConfig, RoleTag,
    Speaker,
};
pub use diagnosis::{
    parse_diagnosis, serialize_diagnosis, Diagnosis, PerformanceLevel, SupportNeeds, TaskType,
    TaskTypeSet,
};
pub use directives::{derive_directives, Difficulty, FormatProfile, GenerationDirectives};
pub use latex::lint::{lint, LintFinding, LintOptions, LintProfile, RuleId, Severity};
pub use latex::sanitize::{sanitize, SecurityViolation};
pub use machine::{SessionState, Trigger};
pub use model::*;
pub use prompt::{PromptTemplate, TemplateError, TemplateSet};
pub use repair::RepairPolicy;
pub use rubric::{validate_rubric, Dimension, RubricEvaluation, Score};
pub use violation::{SchemaViolation, Violation, ViolationKind};
