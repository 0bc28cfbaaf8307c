//! JSON shapes of the HTTP API. Rationals travel as strings: `"3/2"`, or
//! `"3"` when the denominator is one.

use std::collections::BTreeMap;

use netbench_core::Rational;
use serde::{Deserialize, Serialize};

use crate::session::{AgentAction, Reply, ServiceError, SessionStatus, SessionTurn, Snapshot, TurnKind};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub spec: Option<String>,
    pub builtin: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplyRequest {
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ActionJson {
    Ask { slot: String, prompt: String, answers: Vec<String> },
    Act { op: String, message: String },
    Stop,
}

impl From<&AgentAction> for ActionJson {
    fn from(a: &AgentAction) -> Self {
        match a {
            AgentAction::Ask { slot, prompt, answers } => {
                ActionJson::Ask { slot: slot.clone(), prompt: prompt.clone(), answers: answers.clone() }
            }
            AgentAction::Act { op, message } => ActionJson::Act { op: op.clone(), message: message.clone() },
            AgentAction::Stop => ActionJson::Stop,
        }
    }
}

fn rational(r: &Rational) -> String {
    r.to_string()
}

fn outcome(status: &SessionStatus) -> Option<String> {
    status.outcome().map(|o| o.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplyJson {
    pub session_id: String,
    pub action: ActionJson,
    pub actions: Vec<ActionJson>,
    pub remaining: usize,
    pub value: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub outcome: Option<String>,
}

impl From<&Reply> for ReplyJson {
    fn from(r: &Reply) -> Self {
        ReplyJson {
            session_id: r.session_id.clone(),
            action: (&r.action).into(),
            actions: r.actions.iter().map(Into::into).collect(),
            remaining: r.remaining,
            value: rational(&r.value),
            status: r.status.label().to_string(),
            outcome: outcome(&r.status),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnJson {
    pub index: usize,
    pub op: String,
    pub cost: String,
    pub utility: String,
    pub weight: String,
    pub contribution: String,
    pub kind: String,
    pub message: String,
    pub diverged: bool,
}

impl From<&SessionTurn> for TurnJson {
    fn from(t: &SessionTurn) -> Self {
        TurnJson {
            index: t.turn.index,
            op: t.turn.op.clone(),
            cost: rational(&t.turn.cost),
            utility: rational(&t.turn.utility),
            weight: rational(&t.turn.discount_weight),
            contribution: rational(&t.turn.realized_contribution),
            kind: match t.kind {
                TurnKind::Ask => "ask",
                TurnKind::Act => "act",
            }
            .to_string(),
            message: t.message.clone(),
            diverged: t.turn.diverged(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotJson {
    pub session_id: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub outcome: Option<String>,
    pub remaining: usize,
    pub value: String,
    pub turns: Vec<TurnJson>,
    pub bindings: BTreeMap<String, String>,
    /// The outstanding ask, or stop.
    pub action: ActionJson,
}

impl From<&Snapshot> for SnapshotJson {
    fn from(s: &Snapshot) -> Self {
        SnapshotJson {
            session_id: s.session_id.clone(),
            status: s.status.label().to_string(),
            outcome: outcome(&s.status),
            remaining: s.remaining,
            value: rational(&s.value),
            turns: s.turns.iter().map(Into::into).collect(),
            bindings: s.bindings.iter().cloned().collect(),
            action: s.pending.as_ref().map_or(ActionJson::Stop, Into::into),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub allowed: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub column: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorJson {
    pub error: ErrorBody,
}

impl ErrorJson {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        ErrorJson {
            error: ErrorBody {
                kind: kind.to_string(),
                message: message.into(),
                allowed: Vec::new(),
                line: None,
                column: None,
            },
        }
    }
}

/// HTTP status code and body for an error.
pub fn error_response(e: &ServiceError) -> (u16, ErrorJson) {
    use netbench_core::dialog::DialogError;
    let mut body = ErrorJson::new("", e.to_string());
    let status = match e {
        ServiceError::NotFound(_) => {
            body.error.kind = "not_found".into();
            404
        }
        ServiceError::Finished(_) => {
            body.error.kind = "conflict".into();
            409
        }
        ServiceError::IllegalAnswer { allowed, .. } => {
            body.error.kind = "illegal_answer".into();
            body.error.allowed = allowed.clone();
            422
        }
        ServiceError::UnknownBuiltin { allowed, .. } => {
            body.error.kind = "unknown_builtin".into();
            body.error.allowed = allowed.clone();
            400
        }
        ServiceError::BadRequest => {
            body.error.kind = "bad_request".into();
            400
        }
        ServiceError::Parse(se) => {
            body.error.kind = "parse".into();
            body.error.line = Some(se.line);
            body.error.column = Some(se.column);
            400
        }
        ServiceError::Dialog(DialogError::TooManyOperators { .. }) => {
            body.error.kind = "limit".into();
            422
        }
        ServiceError::Dialog(_) => {
            body.error.kind = "invalid_spec".into();
            400
        }
        ServiceError::Search(se) if se.is_limit() => {
            body.error.kind = "limit".into();
            422
        }
        ServiceError::Search(_) => {
            body.error.kind = "internal".into();
            500
        }
    };
    (status, body)
}
