//! The assessment agent's structured diagnosis and its wire contract.
//!
//! Replies are parsed tolerantly: the first balanced JSON object is taken,
//! keys are matched case-, space- and underscore-insensitively, and enum
//! values are matched case-insensitively. The canonical serialization uses
//! snake_case keys and keeps `"yes"`/`"no"` for the reading-impairment flag.
//! Keys that match no field are kept in [`Diagnosis::extra`] and written back
//! unchanged.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::json::{canonical_key, canonical_word, extract_first_object};
use crate::violation::{SchemaViolation, Violation, ViolationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerformanceLevel {
    Weak,
    Medium,
    Strong,
}

impl PerformanceLevel {
    pub const ALL: [Self; 3] = [Self::Weak, Self::Medium, Self::Strong];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Weak => "weak",
            Self::Medium => "medium",
            Self::Strong => "strong",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportNeeds {
    High,
    Medium,
    Low,
}

impl SupportNeeds {
    pub const ALL: [Self; 3] = [Self::High, Self::Medium, Self::Low];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::High => "high",
            Self::Medium => "medium",
            Self::Low => "low",
        }
    }
}

/// Task categories the assessment may recommend. Ordered from basic to advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaskType {
    Basic,
    Application,
    Advanced,
}

impl TaskType {
    pub const ALL: [Self; 3] = [Self::Basic, Self::Application, Self::Advanced];

    /// Wire spelling, as used in the assessment prompt.
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Basic => "basic tasks",
            Self::Application => "application tasks",
            Self::Advanced => "advanced tasks",
        }
    }

    /// Accepts `"basic tasks"`, `"Basic_Tasks"`, `"basic task"` or `"basic"`.
    pub fn parse(value: &str) -> Option<Self> {
        let word = canonical_word(value);
        let stem = word
            .strip_suffix(" tasks")
            .or_else(|| word.strip_suffix(" task"))
            .unwrap_or(&word);
        match stem {
            "basic" => Some(Self::Basic),
            "application" => Some(Self::Application),
            "advanced" => Some(Self::Advanced),
            _ => None,
        }
    }
}

impl Serialize for TaskType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TaskType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Self::parse(&raw).ok_or_else(|| D::Error::custom(format!("unknown task type {raw:?}")))
    }
}

/// Set of recommended task types; iterates in basic→advanced order.
pub type TaskTypeSet = BTreeSet<TaskType>;

/// Affective reactions treated as negative when deriving directives.
pub const NEGATIVE_AFFECTS: [&str; 2] = ["frustration", "insecurity"];

/// Canonical wire keys, in serialization order.
pub const KEYS: [&str; 8] = [
    "performance_level",
    "knowledge_gaps",
    "support_needs",
    "affective_reactions",
    "reading_impairment",
    "recommended_task_types",
    "recommended_focus_topics",
    "reason",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosis {
    pub performance_level: PerformanceLevel,
    pub knowledge_gaps: Vec<String>,
    pub support_needs: SupportNeeds,
    /// Open list; `frustration`, `insecurity` and `self-confidence` are the
    /// canonical values but anything else is preserved.
    pub affective_reactions: Vec<String>,
    pub reading_impairment: bool,
    pub recommended_task_types: TaskTypeSet,
    pub recommended_focus_topics: Vec<String>,
    pub reason: String,
    /// Unrecognized keys, kept verbatim and ignored by all logic.
    pub extra: BTreeMap<String, Value>,
}

impl Diagnosis {
    pub fn has_negative_affect(&self) -> bool {
        self.affective_reactions
            .iter()
            .any(|a| NEGATIVE_AFFECTS.contains(&canonical_word(a).as_str()))
    }

    /// Validates a decoded JSON object against the diagnosis schema.
    pub fn from_object(object: &Map<String, Value>) -> Result<Self, SchemaViolation> {
        let mut violations = Vec::new();
        let mut known: BTreeMap<&'static str, (&str, &Value)> = BTreeMap::new();
        let mut duplicates: BTreeMap<&'static str, Vec<String>> = BTreeMap::new();
        let mut extra = BTreeMap::new();

        for (key, value) in object {
            let canon = canonical_key(key);
            match KEYS.iter().find(|k| **k == canon) {
                Some(&k) => {
                    if let Some((first, _)) = known.get(k) {
                        duplicates
                            .entry(k)
                            .or_insert_with(|| alloc::vec![first.to_string()])
                            .push(key.clone());
                    } else {
                        known.insert(k, (key.as_str(), value));
                    }
                }
                None => {
                    extra.insert(key.clone(), value.clone());
                }
            }
        }
        for (k, keys) in duplicates {
            violations.push(Violation::new(k, ViolationKind::DuplicateKey { keys }));
        }

        let get = |k: &'static str| known.get(k).map(|(_, v)| *v);

        let performance_level = enum_field(
            &mut violations,
            "performance_level",
            get("performance_level"),
            "weak | medium | strong",
            |w| PerformanceLevel::ALL.into_iter().find(|p| p.as_str() == w),
        );
        let support_needs = enum_field(
            &mut violations,
            "support_needs",
            get("support_needs"),
            "high | medium | low",
            |w| SupportNeeds::ALL.into_iter().find(|p| p.as_str() == w),
        );
        let reading_impairment = yes_no(&mut violations, get("reading_impairment"));
        let knowledge_gaps = string_list(&mut violations, "knowledge_gaps", get("knowledge_gaps"));
        let affective_reactions = string_list(
            &mut violations,
            "affective_reactions",
            get("affective_reactions"),
        );
        let recommended_focus_topics = string_list(
            &mut violations,
            "recommended_focus_topics",
            get("recommended_focus_topics"),
        );
        let recommended_task_types = task_types(&mut violations, get("recommended_task_types"));
        let reason = match get("reason") {
            None => {
                violations.push(Violation::new("reason", ViolationKind::Missing));
                None
            }
            Some(Value::String(s)) if s.trim().is_empty() => {
                violations.push(Violation::new("reason", ViolationKind::Empty));
                None
            }
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                violations.push(Violation::new("reason", wrong_type("string")));
                None
            }
        };

        SchemaViolation::check(violations)?;
        // Every field is Some once no violation was recorded.
        Ok(Self {
            performance_level: performance_level.unwrap(),
            knowledge_gaps: knowledge_gaps.unwrap(),
            support_needs: support_needs.unwrap(),
            affective_reactions: affective_reactions.unwrap(),
            reading_impairment: reading_impairment.unwrap(),
            recommended_task_types: recommended_task_types.unwrap(),
            recommended_focus_topics: recommended_focus_topics.unwrap(),
            reason: reason.unwrap(),
            extra,
        })
    }

    /// Checks the invariants of an already constructed value.
    pub fn validate(&self) -> Result<(), SchemaViolation> {
        let mut v = Vec::new();
        if self.recommended_task_types.is_empty() {
            v.push(Violation::new(
                "recommended_task_types",
                ViolationKind::Empty,
            ));
        }
        if self.reason.trim().is_empty() {
            v.push(Violation::new("reason", ViolationKind::Empty));
        }
        SchemaViolation::check(v)
    }
}

fn wrong_type(expected: &str) -> ViolationKind {
    ViolationKind::WrongType {
        expected: expected.to_string(),
    }
}

fn enum_field<T>(
    violations: &mut Vec<Violation>,
    path: &'static str,
    value: Option<&Value>,
    expected: &str,
    lookup: impl Fn(&str) -> Option<T>,
) -> Option<T> {
    match value {
        None => {
            violations.push(Violation::new(path, ViolationKind::Missing));
            None
        }
        Some(Value::String(s)) => {
            let found = lookup(&canonical_word(s));
            if found.is_none() {
                violations.push(Violation::new(
                    path,
                    ViolationKind::InvalidValue {
                        found: s.clone(),
                        expected: expected.to_string(),
                    },
                ));
            }
            found
        }
        Some(_) => {
            violations.push(Violation::new(path, wrong_type("string")));
            None
        }
    }
}

fn yes_no(violations: &mut Vec<Violation>, value: Option<&Value>) -> Option<bool> {
    const PATH: &str = "reading_impairment";
    match value {
        None => {
            violations.push(Violation::new(PATH, ViolationKind::Missing));
            None
        }
        Some(Value::Bool(b)) => Some(*b),
        Some(Value::String(s)) => match canonical_word(s).as_str() {
            "yes" | "true" => Some(true),
            "no" | "false" => Some(false),
            _ => {
                violations.push(Violation::new(
                    PATH,
                    ViolationKind::InvalidValue {
                        found: s.clone(),
                        expected: "yes | no".to_string(),
                    },
                ));
                None
            }
        },
        Some(_) => {
            violations.push(Violation::new(PATH, wrong_type("\"yes\" or \"no\"")));
            None
        }
    }
}

fn string_list(
    violations: &mut Vec<Violation>,
    path: &'static str,
    value: Option<&Value>,
) -> Option<Vec<String>> {
    match value {
        None => {
            violations.push(Violation::new(path, ViolationKind::Missing));
            None
        }
        Some(Value::Array(items)) => {
            let mut out = Vec::with_capacity(items.len());
            let mut ok = true;
            for (i, item) in items.iter().enumerate() {
                match item {
                    Value::String(s) => out.push(s.clone()),
                    _ => {
                        ok = false;
                        violations
                            .push(Violation::new(format!("{path}[{i}]"), wrong_type("string")));
                    }
                }
            }
            ok.then_some(out)
        }
        Some(_) => {
            violations.push(Violation::new(path, wrong_type("array of strings")));
            None
        }
    }
}

fn task_types(violations: &mut Vec<Violation>, value: Option<&Value>) -> Option<TaskTypeSet> {
    const PATH: &str = "recommended_task_types";
    let items = match value {
        None => {
            violations.push(Violation::new(PATH, ViolationKind::Missing));
            return None;
        }
        Some(Value::Array(items)) => items,
        Some(_) => {
            violations.push(Violation::new(PATH, wrong_type("array of strings")));
            return None;
        }
    };
    if items.is_empty() {
        violations.push(Violation::new(PATH, ViolationKind::Empty));
        return None;
    }
    let mut set = TaskTypeSet::new();
    let mut ok = true;
    for (i, item) in items.iter().enumerate() {
        let path = format!("{PATH}[{i}]");
        match item {
            Value::String(s) => match TaskType::parse(s) {
                Some(t) => {
                    set.insert(t);
                }
                None => {
                    ok = false;
                    violations.push(Violation::new(
                        path,
                        ViolationKind::InvalidValue {
                            found: s.clone(),
                            expected: "basic tasks | application tasks | advanced tasks"
                                .to_string(),
                        },
                    ));
                }
            },
            _ => {
                ok = false;
                violations.push(Violation::new(path, wrong_type("string")));
            }
        }
    }
    ok.then_some(set)
}

/// Parses an assessment reply, which may wrap the JSON object in prose.
pub fn parse_diagnosis(text: &str) -> Result<Diagnosis, SchemaViolation> {
    let extracted = extract_first_object(text)?;
    Diagnosis::from_object(&extracted.object)
}

/// Canonical compact JSON with snake_case keys.
pub fn serialize_diagnosis(d: &Diagnosis) -> String {
    serde_json::to_string(d).expect("diagnosis serialization is infallible")
}

impl Serialize for Diagnosis {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(KEYS.len() + self.extra.len()))?;
        map.serialize_entry("performance_level", &self.performance_level)?;
        map.serialize_entry("knowledge_gaps", &self.knowledge_gaps)?;
        map.serialize_entry("support_needs", &self.support_needs)?;
        map.serialize_entry("affective_reactions", &self.affective_reactions)?;
        map.serialize_entry(
            "reading_impairment",
            if self.reading_impairment { "yes" } else { "no" },
        )?;
        map.serialize_entry("recommended_task_types", &self.recommended_task_types)?;
        map.serialize_entry("recommended_focus_topics", &self.recommended_focus_topics)?;
        map.serialize_entry("reason", &self.reason)?;
        for (k, v) in &self.extra {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Diagnosis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let object = Map::<String, Value>::deserialize(d)?;
        Self::from_object(&object).map_err(D::Error::custom)
    }
}
