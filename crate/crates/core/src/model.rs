//! Domain records and their canonical JSON forms.
//!
//! All records are immutable values; the orchestrator builds successors
//! rather than mutating shared state. Field order in each struct is the key
//! order of its canonical serialization.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::chat::RoleTag;
use crate::diagnosis::Diagnosis;
use crate::directives::GenerationDirectives;
use crate::latex::lint::LintFinding;
use crate::machine::{SessionState, Trigger};
use crate::rubric::RubricEvaluation;
use crate::violation::{SchemaViolation, Violation, ViolationKind};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.into())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

id_type!(ProfileId);
id_type!(TaskId);
id_type!(PackId);
id_type!(SessionId);
id_type!(
    /// Lowercase hex SHA-256 of a stored blob.
    ArtifactRef
);

/// Ids end up in file names, so they are restricted to a safe alphabet.
pub fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn check_id(v: &mut Vec<Violation>, id: &str) {
    if !is_valid_id(id) {
        v.push(Violation::new(
            "id",
            ViolationKind::InvalidValue {
                found: id.into(),
                expected: "1-128 chars of [A-Za-z0-9_-]".into(),
            },
        ));
    }
}

fn require_text(v: &mut Vec<Violation>, path: &str, text: &str) {
    if text.trim().is_empty() {
        v.push(Violation::new(path, ViolationKind::Empty));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerformanceHint {
    Low,
    Medium,
    High,
    #[default]
    Unspecified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotivationHint {
    Low,
    High,
    #[default]
    Unspecified,
}

/// Teacher-authored learner persona.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerProfile {
    pub id: ProfileId,
    pub name: String,
    #[serde(default)]
    pub performance_hint: PerformanceHint,
    #[serde(default)]
    pub motivation_hint: MotivationHint,
    #[serde(default)]
    pub reading_impairment: bool,
    #[serde(default)]
    pub attention_needs: bool,
    /// Paragraph injected into the learner prompt.
    pub persona_text: String,
    #[serde(default)]
    pub typical_errors: Vec<String>,
}

impl LearnerProfile {
    pub fn validate(&self) -> Result<(), SchemaViolation> {
        let mut v = Vec::new();
        check_id(&mut v, self.id.as_str());
        require_text(&mut v, "persona_text", &self.persona_text);
        SchemaViolation::check(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskSource {
    #[default]
    Uploaded,
    Repository,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskItem {
    pub id: TaskId,
    pub subject: String,
    /// School year, 1..=13.
    pub grade_level: u8,
    pub topic: String,
    pub statement: String,
    #[serde(default)]
    pub source: TaskSource,
}

impl TaskItem {
    pub fn validate(&self) -> Result<(), SchemaViolation> {
        let mut v = Vec::new();
        check_id(&mut v, self.id.as_str());
        require_text(&mut v, "statement", &self.statement);
        if !(1..=13).contains(&self.grade_level) {
            v.push(Violation::new(
                "grade_level",
                ViolationKind::OutOfRange {
                    found: self.grade_level.into(),
                    min: 1,
                    max: 13,
                },
            ));
        }
        SchemaViolation::check(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completion {
    Completed,
    Partial,
    Abandoned,
}

/// The learner agent's transcript for one task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThoughtProtocol {
    pub profile_id: ProfileId,
    pub task_id: TaskId,
    pub raw_text: String,
    pub completion: Completion,
    #[serde(default)]
    pub affect_markers: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PackKind {
    Curriculum,
    Didactics,
    TeacherMaterial,
}

/// Background text injected into the generator's system prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgePack {
    pub id: PackId,
    pub kind: PackKind,
    pub title: String,
    pub body: String,
}

impl KnowledgePack {
    pub fn validate(&self) -> Result<(), SchemaViolation> {
        let mut v = Vec::new();
        check_id(&mut v, self.id.as_str());
        require_text(&mut v, "body", &self.body);
        SchemaViolation::check(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportKind {
    Pdf,
    Docx,
}

impl ExportKind {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Pdf => "pdf",
            Self::Docx => "docx",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExportOutcome {
    Stored {
        artifact: ArtifactRef,
        bytes: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        page_count: Option<u32>,
    },
    /// No toolchain configured for this export.
    Skipped {
        reason: String,
    },
    Failed {
        log_excerpt: String,
    },
}

impl ExportOutcome {
    pub fn artifact(&self) -> Option<&ArtifactRef> {
        match self {
            Self::Stored { artifact, .. } => Some(artifact),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorksheetArtifact {
    pub latex_source: String,
    pub lint_report: Vec<LintFinding>,
    #[serde(default)]
    pub exports: BTreeMap<ExportKind, ExportOutcome>,
    pub generated_at: DateTime<Utc>,
    pub directives_snapshot: GenerationDirectives,
}

impl WorksheetArtifact {
    /// Document class first, matched begin/end document markers.
    pub fn validate(&self) -> Result<(), SchemaViolation> {
        let mut v = Vec::new();
        let src = self.latex_source.trim_start();
        if !src.starts_with("\\documentclass") {
            v.push(Violation::new(
                "latex_source",
                ViolationKind::InvalidValue {
                    found: "no leading \\documentclass".into(),
                    expected: "a document class declaration first".into(),
                },
            ));
        }
        let begins = src.matches("\\begin{document}").count();
        let ends = src.matches("\\end{document}").count();
        let ordered = match (src.find("\\begin{document}"), src.find("\\end{document}")) {
            (Some(b), Some(e)) => b < e,
            _ => false,
        };
        if begins != 1 || ends != 1 || !ordered {
            v.push(Violation::new(
                "latex_source",
                ViolationKind::InvalidValue {
                    found: alloc::format!("{begins} begin / {ends} end document markers"),
                    expected: "exactly one matched begin/end document pair".into(),
                },
            ));
        }
        if let Err(e) = self.directives_snapshot.validate() {
            v.extend(e.violations.into_iter().map(|mut x| {
                x.path = alloc::format!("directives_snapshot.{}", x.path);
                x
            }));
        }
        SchemaViolation::check(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Modify,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewDecision {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edited_latex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub decided_at: DateTime<Utc>,
}

impl ReviewDecision {
    /// `edited_latex` is required, and only allowed, for `modify`.
    pub fn validate(&self) -> Result<(), SchemaViolation> {
        let mut v = Vec::new();
        match (self.verdict, &self.edited_latex) {
            (Verdict::Modify, None) => {
                v.push(Violation::new("edited_latex", ViolationKind::Missing))
            }
            (Verdict::Modify, Some(t)) if t.trim().is_empty() => {
                v.push(Violation::new("edited_latex", ViolationKind::Empty))
            }
            (Verdict::Accept | Verdict::Reject, Some(_)) => v.push(Violation::new(
                "edited_latex",
                ViolationKind::InvalidValue {
                    found: "present".into(),
                    expected: "absent unless verdict is modify".into(),
                },
            )),
            _ => {}
        }
        SchemaViolation::check(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: SessionState,
    pub to: SessionState,
    pub trigger: Trigger,
    pub at: DateTime<Utc>,
}

/// A stage that failed and may be re-run by advancing again.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Trigger,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub findings: Vec<LintFinding>,
    pub at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSession {
    pub id: SessionId,
    pub profile_id: ProfileId,
    pub task_id: TaskId,
    /// Knowledge packs for the generator; `None` means every stored pack.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pack_ids: Option<Vec<PackId>>,
    pub state: SessionState,
    pub protocol: Option<ThoughtProtocol>,
    pub diagnosis: Option<Diagnosis>,
    pub worksheet: Option<WorksheetArtifact>,
    pub evaluation: Option<RubricEvaluation>,
    pub review: Option<ReviewDecision>,
    #[serde(default)]
    pub retry_counts: BTreeMap<RoleTag, u32>,
    #[serde(default)]
    pub history: Vec<Transition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<StageFailure>,
    pub created_at: DateTime<Utc>,
}

impl PipelineSession {
    pub fn new(id: SessionId, profile_id: ProfileId, task_id: TaskId, now: DateTime<Utc>) -> Self {
        Self {
            id,
            profile_id,
            task_id,
            pack_ids: None,
            state: SessionState::Created,
            protocol: None,
            diagnosis: None,
            worksheet: None,
            evaluation: None,
            review: None,
            retry_counts: BTreeMap::new(),
            history: Vec::new(),
            failure: None,
            created_at: now,
        }
    }

    /// Optional fields are present exactly when the state has passed the
    /// stage that produces them.
    pub fn check_presence(&self) -> Result<(), SchemaViolation> {
        let rank = self.state.rank();
        let mut v = Vec::new();
        let mut expect = |path: &str, present: bool, wanted: bool| {
            if present != wanted {
                let kind = if wanted {
                    ViolationKind::Missing
                } else {
                    ViolationKind::InvalidValue {
                        found: "present".into(),
                        expected: alloc::format!("absent in state {}", self.state.as_str()),
                    }
                };
                v.push(Violation::new(path, kind));
            }
        };
        expect(
            "protocol",
            self.protocol.is_some(),
            rank >= SessionState::Simulated.rank(),
        );
        expect(
            "diagnosis",
            self.diagnosis.is_some(),
            rank >= SessionState::Diagnosed.rank(),
        );
        expect(
            "worksheet",
            self.worksheet.is_some(),
            rank >= SessionState::Generated.rank(),
        );
        expect(
            "evaluation",
            self.evaluation.is_some(),
            rank >= SessionState::Evaluated.rank(),
        );
        expect("review", self.review.is_some(), self.state.is_terminal());
        if let Some(w) = &self.worksheet {
            if let Err(e) = w.validate() {
                v.extend(e.violations);
            }
        }
        SchemaViolation::check(v)
    }

    pub fn retries(&self, role: RoleTag) -> u32 {
        self.retry_counts.get(&role).copied().unwrap_or(0)
    }
}
