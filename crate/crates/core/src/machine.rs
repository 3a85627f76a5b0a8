//! Session state machine.
//!
//! | from            | trigger        | to              |
//! |-----------------|----------------|-----------------|
//! | created         | simulate       | simulated       |
//! | simulated       | diagnose       | diagnosed       |
//! | diagnosed       | generate       | generated       |
//! | generated       | evaluate       | evaluated       |
//! | evaluated       | submit_review  | awaiting_review |
//! | awaiting_review | review_accept  | accepted        |
//! | awaiting_review | review_reject  | rejected        |
//! | awaiting_review | review_modify  | generated       |
//!
//! `accepted` and `rejected` are terminal. `review_modify` is the only
//! transition that moves backwards.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    Created,
    Simulated,
    Diagnosed,
    Generated,
    Evaluated,
    AwaitingReview,
    Accepted,
    Rejected,
}

impl SessionState {
    pub const ALL: [Self; 8] = [
        Self::Created,
        Self::Simulated,
        Self::Diagnosed,
        Self::Generated,
        Self::Evaluated,
        Self::AwaitingReview,
        Self::Accepted,
        Self::Rejected,
    ];

    /// Pipeline depth; both terminal states share the last rank.
    pub fn rank(self) -> u8 {
        match self {
            Self::Created => 0,
            Self::Simulated => 1,
            Self::Diagnosed => 2,
            Self::Generated => 3,
            Self::Evaluated => 4,
            Self::AwaitingReview => 5,
            Self::Accepted | Self::Rejected => 6,
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, Self::Accepted | Self::Rejected)
    }

    /// The trigger `advance` fires from this state, if any.
    pub fn next_stage(self) -> Option<Trigger> {
        match self {
            Self::Created => Some(Trigger::Simulate),
            Self::Simulated => Some(Trigger::Diagnose),
            Self::Diagnosed => Some(Trigger::Generate),
            Self::Generated => Some(Trigger::Evaluate),
            Self::Evaluated => Some(Trigger::SubmitReview),
            Self::AwaitingReview | Self::Accepted | Self::Rejected => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Created => "created",
            Self::Simulated => "simulated",
            Self::Diagnosed => "diagnosed",
            Self::Generated => "generated",
            Self::Evaluated => "evaluated",
            Self::AwaitingReview => "awaiting_review",
            Self::Accepted => "accepted",
            Self::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    Simulate,
    Diagnose,
    Generate,
    Evaluate,
    SubmitReview,
    ReviewAccept,
    ReviewReject,
    ReviewModify,
}

impl Trigger {
    pub const ALL: [Self; 8] = [
        Self::Simulate,
        Self::Diagnose,
        Self::Generate,
        Self::Evaluate,
        Self::SubmitReview,
        Self::ReviewAccept,
        Self::ReviewReject,
        Self::ReviewModify,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Diagnose => "diagnose",
            Self::Generate => "generate",
            Self::Evaluate => "evaluate",
            Self::SubmitReview => "submit_review",
            Self::ReviewAccept => "review_accept",
            Self::ReviewReject => "review_reject",
            Self::ReviewModify => "review_modify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("trigger {} is not allowed in state {}", trigger.as_str(), from.as_str())]
pub struct IllegalTransition {
    pub from: SessionState,
    pub trigger: Trigger,
}

/// Looks up the legal transition table.
pub fn transition(from: SessionState, trigger: Trigger) -> Result<SessionState, IllegalTransition> {
    use SessionState as S;
    use Trigger as T;
    let to = match (from, trigger) {
        (S::Created, T::Simulate) => S::Simulated,
        (S::Simulated, T::Diagnose) => S::Diagnosed,
        (S::Diagnosed, T::Generate) => S::Generated,
        (S::Generated, T::Evaluate) => S::Evaluated,
        (S::Evaluated, T::SubmitReview) => S::AwaitingReview,
        (S::AwaitingReview, T::ReviewAccept) => S::Accepted,
        (S::AwaitingReview, T::ReviewReject) => S::Rejected,
        (S::AwaitingReview, T::ReviewModify) => S::Generated,
        _ => return Err(IllegalTransition { from, trigger }),
    };
    Ok(to)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_eight_legal_edges() {
        let legal = SessionState::ALL
            .iter()
            .flat_map(|s| Trigger::ALL.iter().map(move |t| (*s, *t)))
            .filter(|(s, t)| transition(*s, *t).is_ok())
            .count();
        assert_eq!(legal, 8);
    }

    #[test]
    fn only_modify_moves_backwards() {
        for s in SessionState::ALL {
            for t in Trigger::ALL {
                if let Ok(to) = transition(s, t) {
                    assert!(
                        to.rank() > s.rank() || t == Trigger::ReviewModify,
                        "{s:?} --{t:?}--> {to:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn terminal_states_have_no_exits() {
        for t in Trigger::ALL {
            assert!(transition(SessionState::Accepted, t).is_err());
            assert!(transition(SessionState::Rejected, t).is_err());
        }
    }

    #[test]
    fn next_stage_is_legal() {
        for s in SessionState::ALL {
            if let Some(t) = s.next_stage() {
                assert!(transition(s, t).is_ok());
            }
        }
    }
}
