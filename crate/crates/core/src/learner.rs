//! Heuristics over learner transcripts.
//!
//! Completion classification is a convenience for display; directive
//! derivation never reads it. A transcript is `abandoned` when an abandonment
//! phrase appears and no completion phrase follows the last one, `completed`
//! when a completion phrase appears, and `partial` otherwise. Matching is
//! case-insensitive on whole phrases.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::Completion;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionPhrases {
    pub abandoned: Vec<String>,
    pub completed: Vec<String>,
}

impl Default for CompletionPhrases {
    fn default() -> Self {
        let own = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self {
            abandoned: own(&[
                "i give up",
                "i'm giving up",
                "i am giving up",
                "i gave up",
                "giving up on this",
                "i quit",
                "i can't do this",
                "i cannot do this",
                "i'll stop here",
                "i will stop here",
                "i'm stopping here",
                "i don't want to do this anymore",
                "this is pointless",
            ]),
            completed: own(&[
                "final answer",
                "so the answer is",
                "the answer is",
                "so the solution is",
                "the solution is",
                "i'm done",
                "i am done",
                "that's the answer",
            ]),
        }
    }
}

/// Byte offset of the last occurrence of any phrase in the lowercased text.
fn last_match(haystack: &str, phrases: &[String]) -> Option<usize> {
    phrases
        .iter()
        .filter_map(|p| {
            let p = fold(p);
            haystack
                .rmatch_indices(p.as_str())
                .find(|(i, m)| is_word_bounded(haystack, *i, m.len()))
                .map(|(i, _)| i)
        })
        .max()
}

fn is_word_bounded(s: &str, start: usize, len: usize) -> bool {
    let before = s[..start].chars().next_back();
    let after = s[start + len..].chars().next();
    !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
}

fn fold(text: &str) -> String {
    text.to_lowercase().replace('\u{2019}', "'")
}

pub fn classify_completion(text: &str, phrases: &CompletionPhrases) -> Completion {
    let lower = fold(text);
    let abandoned = last_match(&lower, &phrases.abandoned);
    let completed = last_match(&lower, &phrases.completed);
    match (abandoned, completed) {
        (Some(a), Some(c)) if c > a => Completion::Completed,
        (Some(_), _) => Completion::Abandoned,
        (None, Some(_)) => Completion::Completed,
        (None, None) => Completion::Partial,
    }
}

const AFFECT_CUES: &[(&str, &[&str])] = &[
    (
        "frustration",
        &["frustrat", "annoyed", "annoying", "hate this"],
    ),
    (
        "insecurity",
        &[
            "not sure",
            "unsure",
            "confused",
            "confusing",
            "nervous",
            "anxious",
            "i'm bad at",
            "i am bad at",
            "i'm stupid",
            "scared",
        ],
    ),
    (
        "self-confidence",
        &[
            "confident",
            "easy",
            "proud",
            "i got this",
            "i've got this",
            "i know how",
        ],
    ),
    ("boredom", &["boring", "bored"]),
];

/// Canonical affect tags whose cues occur in the transcript, in table order.
pub fn affect_markers(text: &str) -> Vec<String> {
    let lower = fold(text);
    AFFECT_CUES
        .iter()
        .filter(|(_, cues)| cues.iter().any(|c| lower.contains(c)))
        .map(|(tag, _)| tag.to_string())
        .collect()
}
