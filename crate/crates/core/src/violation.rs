//! Machine-readable schema violations shared by every contract check.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// What went wrong at a single path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    Missing,
    Empty,
    InvalidValue { found: String, expected: String },
    WrongType { expected: String },
    OutOfRange { found: i64, min: i64, max: i64 },
    DuplicateKey { keys: Vec<String> },
    NoJsonObject,
    MalformedJson { detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Canonical path, e.g. `performance_level` or `recommended_task_types[1]`.
    /// `$` designates the whole document.
    pub path: String,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

impl Violation {
    pub fn new(path: impl Into<String>, kind: ViolationKind) -> Self {
        Self {
            path: path.into(),
            kind,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.path)?;
        match &self.kind {
            ViolationKind::Missing => f.write_str("missing"),
            ViolationKind::Empty => f.write_str("must not be empty"),
            ViolationKind::InvalidValue { found, expected } => {
                write!(f, "invalid value {found:?} (expected {expected})")
            }
            ViolationKind::WrongType { expected } => write!(f, "wrong type (expected {expected})"),
            ViolationKind::OutOfRange { found, min, max } => {
                write!(f, "{found} out of {min}..{max}")
            }
            ViolationKind::DuplicateKey { keys } => {
                write!(f, "given more than once as ")?;
                for (i, k) in keys.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k:?}")?;
                }
                Ok(())
            }
            ViolationKind::NoJsonObject => f.write_str("no JSON object found"),
            ViolationKind::MalformedJson { detail } => write!(f, "malformed JSON ({detail})"),
        }
    }
}

/// A failed contract check, carrying every offending path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
pub struct SchemaViolation {
    pub violations: Vec<Violation>,
}

impl SchemaViolation {
    pub fn single(path: impl Into<String>, kind: ViolationKind) -> Self {
        Self {
            violations: alloc::vec![Violation::new(path, kind)],
        }
    }

    pub fn paths(&self) -> Vec<&str> {
        self.violations.iter().map(|v| v.path.as_str()).collect()
    }

    pub fn has_path(&self, path: &str) -> bool {
        self.violations.iter().any(|v| v.path == path)
    }

    /// Turns an accumulated list into `Ok(())` when empty.
    pub fn check(violations: Vec<Violation>) -> Result<(), Self> {
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Self { violations })
        }
    }
}

impl fmt::Display for SchemaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("schema violation: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
