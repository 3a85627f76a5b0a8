//! Re-prompting policy for replies that fail a schema check.

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::violation::SchemaViolation;

pub const DEFAULT_REPAIR_INSTRUCTION: &str =
    "Your previous reply did not match the required JSON format. \
Fix every problem listed below and reply with only the corrected JSON object.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairPolicy {
    /// Total provider calls allowed for one stage, including the first.
    pub max_attempts: u32,
    pub repair_instruction: String,
}

impl Default for RepairPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            repair_instruction: DEFAULT_REPAIR_INSTRUCTION.into(),
        }
    }
}

impl RepairPolicy {
    /// `max_attempts` is floored at one.
    pub fn new(max_attempts: u32) -> Self {
        Self {
            max_attempts: max_attempts.max(1),
            ..Self::default()
        }
    }

    pub fn attempts(&self) -> u32 {
        self.max_attempts.max(1)
    }

    /// Follow-up user message listing each violation on its own line.
    pub fn repair_message(&self, violation: &SchemaViolation) -> String {
        let mut out = self.repair_instruction.clone();
        for v in &violation.violations {
            out.push_str("\n- ");
            out.push_str(&alloc::format!("{v}"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::violation::ViolationKind;

    #[test]
    fn message_lists_paths() {
        let v = SchemaViolation::single("performance_level", ViolationKind::Missing);
        let msg = RepairPolicy::default().repair_message(&v);
        assert!(msg.ends_with("\n- performance_level: missing"));
    }

    #[test]
    fn attempts_at_least_one() {
        assert_eq!(RepairPolicy::new(0).attempts(), 1);
        assert_eq!(RepairPolicy::default().attempts(), 3);
    }
}
