//! Deterministic mapping from a diagnosis to generation constraints.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::diagnosis::{Diagnosis, PerformanceLevel, TaskTypeSet};
use crate::violation::{SchemaViolation, Violation, ViolationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    /// Simple tasks with step-by-step worked examples and clear operators.
    SimpleWithWorkedExamples,
    /// Short repetition mixed with application tasks.
    MixedRepetitionApplication,
    /// Challenging tasks only; no tips, no repetition.
    AdvancedOnly,
}

impl Difficulty {
    pub fn for_level(level: PerformanceLevel) -> Self {
        match level {
            PerformanceLevel::Weak => Self::SimpleWithWorkedExamples,
            PerformanceLevel::Medium => Self::MixedRepetitionApplication,
            PerformanceLevel::Strong => Self::AdvancedOnly,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Self::SimpleWithWorkedExamples => {
                "simple tasks with step-by-step worked examples and clear operators"
            }
            Self::MixedRepetitionApplication => {
                "a mixture of short repetition and application tasks"
            }
            Self::AdvancedOnly => "only challenging, advanced tasks without tips or repetitions",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatProfile {
    #[default]
    Standard,
    Dyslexia,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationDirectives {
    pub task_types: TaskTypeSet,
    pub difficulty: Difficulty,
    pub dyslexia_mode: bool,
    pub motivational_elements: bool,
    pub focus_topics: Vec<String>,
    pub format_profile: FormatProfile,
}

impl GenerationDirectives {
    /// Hints and repetition are allowed unless only advanced work is wanted.
    pub fn hints_allowed(&self) -> bool {
        self.difficulty != Difficulty::AdvancedOnly
    }

    pub fn validate(&self) -> Result<(), SchemaViolation> {
        let mut v = Vec::new();
        if self.task_types.is_empty() {
            v.push(Violation::new("task_types", ViolationKind::Empty));
        }
        if self.dyslexia_mode != (self.format_profile == FormatProfile::Dyslexia) {
            v.push(Violation::new(
                "format_profile",
                ViolationKind::InvalidValue {
                    found: alloc::format!("{:?}", self.format_profile),
                    expected: "dyslexia exactly when dyslexia_mode is set".into(),
                },
            ));
        }
        SchemaViolation::check(v)
    }

    /// Plain-text summary handed to the generator alongside the diagnosis.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str("- Task types to create (no others): ");
        for (i, t) in self.task_types.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(t.as_str());
        }
        let _ = write!(out, "\n- Difficulty: {}", self.difficulty.describe());
        out.push_str(if self.dyslexia_mode {
            "\n- Dyslexia guidelines: active"
        } else {
            "\n- Dyslexia guidelines: not needed; use standard LaTeX"
        });
        out.push_str(if self.motivational_elements {
            "\n- Motivational elements: integrate them"
        } else {
            "\n- Motivational elements: not required"
        });
        if !self.focus_topics.is_empty() {
            out.push_str("\n- Focus topics: ");
            out.push_str(&self.focus_topics.join("; "));
        }
        out
    }
}

/// Pure and total on valid diagnoses.
pub fn derive_directives(d: &Diagnosis) -> GenerationDirectives {
    let format_profile = if d.reading_impairment {
        FormatProfile::Dyslexia
    } else {
        FormatProfile::Standard
    };
    GenerationDirectives {
        task_types: d.recommended_task_types.clone(),
        difficulty: Difficulty::for_level(d.performance_level),
        dyslexia_mode: d.reading_impairment,
        motivational_elements: d.has_negative_affect(),
        focus_topics: d.recommended_focus_topics.clone(),
        format_profile,
    }
}
