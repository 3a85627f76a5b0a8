//! Four-dimension worksheet rubric with 1..6 scores.
//!
//! Scores outside the scale are rejected, never clamped.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

use crate::json::{canonical_key, extract_first_object};
use crate::violation::{SchemaViolation, Violation, ViolationKind};

pub const MIN_SCORE: u8 = 1;
pub const MAX_SCORE: u8 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    DidacticStructure,
    Clarity,
    FormatDesign,
    Creativity,
}

impl Dimension {
    pub const ALL: [Self; 4] = [
        Self::DidacticStructure,
        Self::Clarity,
        Self::FormatDesign,
        Self::Creativity,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Self::DidacticStructure => "didactic_structure",
            Self::Clarity => "clarity",
            Self::FormatDesign => "format_design",
            Self::Creativity => "creativity",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Self::DidacticStructure => "Didactical Structure",
            Self::Clarity => "Clarity of the Task",
            Self::FormatDesign => "Format and Design",
            Self::Creativity => "Creativity of Tasks",
        }
    }

    /// Matches canonical keys and the common long-form titles.
    pub fn from_key(key: &str) -> Option<Self> {
        match canonical_key(key).as_str() {
            "didactic_structure" | "didactical_structure" | "didactic" | "structure" => {
                Some(Self::DidacticStructure)
            }
            "clarity" | "clarity_of_the_task" | "clarity_of_task" | "task_clarity" => {
                Some(Self::Clarity)
            }
            "format_design" | "format_and_design" | "format" | "design" => Some(Self::FormatDesign),
            "creativity" | "creativity_of_tasks" | "creativity_of_the_tasks" => {
                Some(Self::Creativity)
            }
            _ => None,
        }
    }

    /// Score descriptors, index 0 is score 1.
    pub fn anchors(self) -> &'static [&'static str; 6] {
        match self {
            Self::DidacticStructure => &[
                "No usable worksheet structure is provided.",
                "The worksheet lacks a coherent didactical structure; task sequencing and support are confusing or misleading.",
                "The structure is difficult to follow or overly complex without clear pedagogical justification.",
                "The worksheet follows a basic structure, but provides little explicit pedagogical guidance or progression.",
                "The overall structure is mostly clear and pedagogically sound, with minor gaps in task sequencing or support.",
                "The worksheet shows a clear pedagogical structure with meaningful task sequencing, appropriate scaffolding, and transparent learning goals.",
            ],
            Self::Clarity => &[
                "Task instructions are missing or incomprehensible.",
                "Instructions are misleading, confusing, or use inappropriate terminology.",
                "Language or task formulation is unnecessarily complex or unclear, making the task harder to understand.",
                "Instructions are generally understandable, but lack clarity or learner-oriented formulation.",
                "Instructions are mostly clear, with only minor ambiguities that do not hinder task understanding.",
                "Task instructions and language are clear, precise, and easy to understand for the intended learner group.",
            ],
            Self::FormatDesign => &[
                "The worksheet lacks usable formatting or visual structure.",
                "The design is confusing, visually overwhelming, or obstructs understanding and motivation.",
                "The layout is cluttered or poorly structured, making it harder to work with the material.",
                "The worksheet is functional but visually plain; formatting neither supports nor hinders motivation.",
                "The layout is clear and readable, with minor design issues that do not hinder working with the material.",
                "The worksheet is visually clear, well-structured, and learner-friendly; layout, formatting, and design actively support motivation and task engagement.",
            ],
            Self::Creativity => &[
                "No creative elements are present or the task is missing.",
                "Creative elements are inappropriate, distracting, or misaligned with the learning goal.",
                "Attempts at creativity are superficial or add little educational value.",
                "The tasks follow common instructional patterns without particular creative features.",
                "The worksheet includes some creative or motivating elements that go beyond standard task formats.",
                "The tasks are highly original, motivating, and varied compared to typical instructional materials; creativity clearly enhances engagement.",
            ],
        }
    }

    pub fn anchor(self, score: Score) -> &'static str {
        self.anchors()[usize::from(score.get() - 1)]
    }
}

/// A rubric score, always within 1..=6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Score(u8);

impl Score {
    pub fn new(value: i64) -> Option<Self> {
        (i64::from(MIN_SCORE)..=i64::from(MAX_SCORE))
            .contains(&value)
            .then_some(Self(value as u8))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = i64::deserialize(d)?;
        Self::new(raw).ok_or_else(|| D::Error::custom(format!("score {raw} out of 1..6")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEvaluation")]
pub struct RubricEvaluation {
    pub didactic_structure: Score,
    pub clarity: Score,
    pub format_design: Score,
    pub creativity: Score,
    pub rationales: BTreeMap<Dimension, String>,
}

#[derive(Deserialize)]
struct RawEvaluation {
    didactic_structure: Score,
    clarity: Score,
    format_design: Score,
    creativity: Score,
    rationales: BTreeMap<Dimension, String>,
}

impl TryFrom<RawEvaluation> for RubricEvaluation {
    type Error = SchemaViolation;

    fn try_from(raw: RawEvaluation) -> Result<Self, Self::Error> {
        let eval = Self {
            didactic_structure: raw.didactic_structure,
            clarity: raw.clarity,
            format_design: raw.format_design,
            creativity: raw.creativity,
            rationales: raw.rationales,
        };
        eval.validate()?;
        Ok(eval)
    }
}

impl RubricEvaluation {
    pub fn score(&self, dim: Dimension) -> Score {
        match dim {
            Dimension::DidacticStructure => self.didactic_structure,
            Dimension::Clarity => self.clarity,
            Dimension::FormatDesign => self.format_design,
            Dimension::Creativity => self.creativity,
        }
    }

    fn validate(&self) -> Result<(), SchemaViolation> {
        let v = Dimension::ALL
            .iter()
            .filter(|d| self.rationales.get(d).is_none_or(|r| r.trim().is_empty()))
            .map(|d| Violation::new(format!("rationales.{}", d.key()), ViolationKind::Empty))
            .collect();
        SchemaViolation::check(v)
    }
}

/// Validates raw dimension→score and dimension→rationale maps.
///
/// Keys are matched tolerantly (see [`Dimension::from_key`]); unknown keys
/// are ignored.
pub fn validate_rubric(
    scores: &Map<String, Value>,
    rationales: &Map<String, Value>,
) -> Result<RubricEvaluation, SchemaViolation> {
    let mut violations = Vec::new();
    let mut found: BTreeMap<Dimension, Score> = BTreeMap::new();
    let mut texts: BTreeMap<Dimension, String> = BTreeMap::new();

    for (key, value) in scores {
        let Some(dim) = Dimension::from_key(key) else {
            continue;
        };
        let path = dim.key();
        match value.as_i64() {
            Some(n) => match Score::new(n) {
                Some(s) => {
                    found.insert(dim, s);
                }
                None => violations.push(Violation::new(
                    path,
                    ViolationKind::OutOfRange {
                        found: n,
                        min: MIN_SCORE.into(),
                        max: MAX_SCORE.into(),
                    },
                )),
            },
            None => violations.push(Violation::new(
                path,
                ViolationKind::WrongType {
                    expected: "integer".to_string(),
                },
            )),
        }
    }
    for (key, value) in rationales {
        let Some(dim) = Dimension::from_key(key) else {
            continue;
        };
        if let Value::String(s) = value {
            texts.insert(dim, s.clone());
        }
    }

    for dim in Dimension::ALL {
        if !found.contains_key(&dim) && !violations.iter().any(|v| v.path == dim.key()) {
            violations.push(Violation::new(dim.key(), ViolationKind::Missing));
        }
        let rationale_path = format!("rationales.{}", dim.key());
        match texts.get(&dim) {
            None if rationales
                .iter()
                .any(|(k, _)| Dimension::from_key(k) == Some(dim)) =>
            {
                violations.push(Violation::new(
                    rationale_path,
                    ViolationKind::WrongType {
                        expected: "string".to_string(),
                    },
                ))
            }
            None => violations.push(Violation::new(rationale_path, ViolationKind::Missing)),
            Some(t) if t.trim().is_empty() => {
                violations.push(Violation::new(rationale_path, ViolationKind::Empty))
            }
            Some(_) => {}
        }
    }
    SchemaViolation::check(violations)?;

    Ok(RubricEvaluation {
        didactic_structure: found[&Dimension::DidacticStructure],
        clarity: found[&Dimension::Clarity],
        format_design: found[&Dimension::FormatDesign],
        creativity: found[&Dimension::Creativity],
        rationales: texts,
    })
}

/// Parses an evaluator reply of the form
/// `{"scores": {...}, "rationales": {...}}`, possibly wrapped in prose.
pub fn parse_evaluation(text: &str) -> Result<RubricEvaluation, SchemaViolation> {
    let extracted = extract_first_object(text)?;
    let obj = &extracted.object;
    let section = |name: &str| {
        obj.iter()
            .find(|(k, _)| canonical_key(k) == name)
            .map(|(_, v)| v)
    };
    let empty = Map::new();
    let mut violations = Vec::new();
    let mut take = |name: &'static str| match section(name) {
        Some(Value::Object(m)) => Some(m),
        Some(_) => {
            violations.push(Violation::new(
                name,
                ViolationKind::WrongType {
                    expected: "object".to_string(),
                },
            ));
            None
        }
        None => {
            violations.push(Violation::new(name, ViolationKind::Missing));
            None
        }
    };
    let scores = take("scores");
    let rationales = take("rationales");
    SchemaViolation::check(violations)?;
    validate_rubric(scores.unwrap_or(&empty), rationales.unwrap_or(&empty))
}

/// Renders the anchor table as plain text for the evaluator prompt.
pub fn anchor_table() -> String {
    let mut out = String::new();
    for dim in Dimension::ALL {
        out.push_str(dim.title());
        out.push_str(" (key \"");
        out.push_str(dim.key());
        out.push_str("\"):\n");
        for score in (MIN_SCORE..=MAX_SCORE).rev() {
            out.push_str(&format!(
                "  {score}: {}\n",
                dim.anchors()[usize::from(score - 1)]
            ));
        }
    }
    out.truncate(out.trim_end().len());
    out
}
