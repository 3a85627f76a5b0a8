//! Extraction of JSON objects from free-form model replies, plus the
//! tolerant key canonicalization used by the diagnosis and rubric parsers.

use alloc::borrow::Cow;
use alloc::string::{String, ToString};

use serde_json::{Map, Value};

use crate::violation::{SchemaViolation, ViolationKind};

/// The first JSON object found in a reply.
#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub object: Map<String, Value>,
    /// Byte range of the object within the reply.
    pub start: usize,
    pub end: usize,
    /// Another balanced object follows the one returned. It is ignored.
    pub more_objects: bool,
}

/// Finds the end (exclusive) of the balanced `{...}` starting at `start`,
/// skipping braces inside JSON strings.
fn balanced_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_str = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(start) {
        if in_str {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_str = false;
            }
            continue;
        }
        match b {
            b'"' => in_str = true,
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

fn normalize_quotes(s: &str) -> Cow<'_, str> {
    if s.contains(['\u{201c}', '\u{201d}', '\u{201e}']) {
        Cow::Owned(s.replace(['\u{201c}', '\u{201d}', '\u{201e}'], "\""))
    } else {
        Cow::Borrowed(s)
    }
}

/// Returns the first balanced top-level object in `text` that parses as JSON.
///
/// Candidates are tried left to right so stray braces in surrounding prose do
/// not hide a later valid object. A candidate that only parses after
/// replacing typographic double quotes with `"` is accepted too.
pub fn extract_first_object(text: &str) -> Result<Extracted, SchemaViolation> {
    let bytes = text.as_bytes();
    let mut first_error: Option<String> = None;
    let mut found_open = false;
    let mut pos = 0;
    while let Some(off) = text[pos..].find('{') {
        found_open = true;
        let start = pos + off;
        let Some(end) = balanced_end(bytes, start) else {
            first_error.get_or_insert_with(|| "unbalanced braces".to_string());
            break;
        };
        let raw = &text[start..end];
        let parsed = serde_json::from_str::<Value>(raw).or_else(|e| match normalize_quotes(raw) {
            Cow::Owned(fixed) => serde_json::from_str::<Value>(&fixed),
            Cow::Borrowed(_) => Err(e),
        });
        match parsed {
            Ok(Value::Object(object)) => {
                let more_objects = text[end..]
                    .find('{')
                    .is_some_and(|o| balanced_end(bytes, end + o).is_some());
                return Ok(Extracted {
                    object,
                    start,
                    end,
                    more_objects,
                });
            }
            Ok(_) => unreachable!("a balanced brace span parses only as an object"),
            Err(e) => {
                first_error.get_or_insert_with(|| e.to_string());
                pos = start + 1;
            }
        }
    }
    let kind = match (found_open, first_error) {
        (false, _) => ViolationKind::NoJsonObject,
        (true, Some(detail)) => ViolationKind::MalformedJson { detail },
        (true, None) => ViolationKind::NoJsonObject,
    };
    Err(SchemaViolation::single("$", kind))
}

/// Lowercases and folds runs of spaces, hyphens and underscores into a
/// single underscore: `"Performance level"` becomes `performance_level`.
pub fn canonical_key(key: &str) -> String {
    let mut out = String::with_capacity(key.len());
    let mut pending_sep = false;
    for c in key.trim().chars() {
        if c.is_whitespace() || c == '_' || c == '-' {
            pending_sep = !out.is_empty();
        } else {
            if pending_sep {
                out.push('_');
                pending_sep = false;
            }
            out.extend(c.to_lowercase());
        }
    }
    out
}

/// Lowercased value with separators folded to single spaces.
pub(crate) fn canonical_word(value: &str) -> String {
    canonical_key(value).replace('_', " ")
}
