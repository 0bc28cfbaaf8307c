//! In-memory dialog sessions.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use netbench_core::dialog::{slot_bindings, CompiledDialog, DialogAct, DialogError};
use netbench_core::exec::{realized_value, replan_step, EpisodeStatus, Turn};
use netbench_core::search::Solver;
use netbench_core::textio::{builtin_spec, parse_dialog_spec, SourceError, BUILTIN_SPECS};
use netbench_core::{Algorithm, DialogSpec, Limits, Rational, SearchError, State};
use parking_lot::{Mutex, RwLock};
use rand::Rng;
use thiserror::Error;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("no session with id `{0}`")]
    NotFound(String),
    #[error("session `{0}` is finished")]
    Finished(String),
    #[error("`{answer}` is not an allowed answer for `{slot}`")]
    IllegalAnswer { slot: String, answer: String, allowed: Vec<String> },
    #[error("unknown built-in spec `{name}`")]
    UnknownBuiltin { name: String, allowed: Vec<String> },
    #[error("request must name exactly one of `spec` and `builtin`")]
    BadRequest,
    #[error("{0}")]
    Parse(#[from] SourceError),
    #[error(transparent)]
    Dialog(#[from] DialogError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Where a new session's dialog spec comes from.
#[derive(Debug, Clone)]
pub enum SpecSource {
    Text(String),
    Builtin(String),
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub limits: Limits,
    pub algorithm: Algorithm,
    pub idle_timeout: Duration,
    /// Append-only transcript per session, `<dir>/<id>.transcript`.
    pub transcript_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            limits: Limits::default(),
            algorithm: Algorithm::Dp,
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
            transcript_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionStatus {
    AwaitingUser,
    AgentActing,
    Finished(EpisodeStatus),
}

impl SessionStatus {
    pub fn label(&self) -> &'static str {
        match self {
            SessionStatus::AwaitingUser => "awaiting_user",
            SessionStatus::AgentActing => "agent_acting",
            SessionStatus::Finished(_) => "finished",
        }
    }

    pub fn outcome(&self) -> Option<EpisodeStatus> {
        match self {
            SessionStatus::Finished(s) => Some(*s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AgentAction {
    Ask { slot: String, prompt: String, answers: Vec<String> },
    Act { op: String, message: String },
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnKind {
    Ask,
    Act,
}

/// One executed turn with its dialog rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionTurn {
    pub turn: Turn<Rational>,
    pub kind: TurnKind,
    pub message: String,
}

/// Result of creating or advancing a session.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub session_id: String,
    /// What the agent needs next: an ask, or stop.
    pub action: AgentAction,
    /// Acts executed automatically before `action`.
    pub actions: Vec<AgentAction>,
    pub remaining: usize,
    pub value: Rational,
    pub status: SessionStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub session_id: String,
    pub status: SessionStatus,
    pub remaining: usize,
    pub value: Rational,
    pub turns: Vec<SessionTurn>,
    pub bindings: Vec<(String, String)>,
    pub pending: Option<AgentAction>,
}

struct Session {
    id: String,
    spec: DialogSpec,
    compiled: CompiledDialog<Rational>,
    state: State,
    remaining: usize,
    turns: Vec<SessionTurn>,
    status: SessionStatus,
    /// Slot index of the outstanding ask.
    pending: Option<usize>,
    last_active: Instant,
}

impl Session {
    fn value(&self) -> Rational {
        let turns: Vec<Turn<Rational>> = self.turns.iter().map(|t| t.turn.clone()).collect();
        realized_value(self.compiled.problem.objective(), &turns)
    }

    fn bindings(&self) -> Vec<(String, String)> {
        let map = slot_bindings(&self.spec, &self.state);
        self.spec.slots().iter().filter_map(|s| map.get(&s.name).map(|a| (s.name.clone(), a.clone()))).collect()
    }

    fn pending_action(&self) -> Option<AgentAction> {
        let slot = &self.spec.slots()[self.pending?];
        Some(AgentAction::Ask { slot: slot.name.clone(), prompt: slot.prompt.clone(), answers: slot.answers.clone() })
    }

    fn gamma(&self) -> Rational {
        self.compiled.problem.objective().gamma()
    }

    fn act_message(&self, act: DialogAct) -> String {
        let bindings = slot_bindings(&self.spec, &self.state);
        match act {
            DialogAct::Advise(k) => self.spec.render(&self.spec.advisories()[k].message_template, &bindings),
            DialogAct::Run(j) => {
                let q = &self.spec.queries()[j];
                let args: Vec<String> =
                    q.requires.iter().map(|s| format!("{s}={}", bindings.get(s).map_or("?", String::as_str))).collect();
                format!("Looked up {} for {}.", q.name, args.join(", "))
            }
            DialogAct::Ask(i) => self.spec.slots()[i].prompt.clone(),
        }
    }

    fn record(&mut self, turn: Turn<Rational>, kind: TurnKind, message: String, log: &mut Vec<String>) {
        log.push(format!(
            "{} kind={} message={:?}",
            turn.transcript_line(),
            if kind == TurnKind::Ask { "ask" } else { "act" },
            message
        ));
        self.state = turn.observed_state.clone();
        self.remaining -= 1;
        self.turns.push(SessionTurn { turn, kind, message });
    }

    fn finish(&mut self, outcome: EpisodeStatus, log: &mut Vec<String>) {
        self.status = SessionStatus::Finished(outcome);
        self.pending = None;
        log.push(format!("realized_value={} status={outcome}", self.value()));
    }

    /// Runs non-ask operators until the plan needs the user, stops, or the
    /// horizon runs out.
    fn auto_advance(
        &mut self,
        solver: &Solver,
        algorithm: Algorithm,
        log: &mut Vec<String>,
    ) -> Result<Vec<AgentAction>, ServiceError> {
        self.status = SessionStatus::AgentActing;
        let mut actions = Vec::new();
        loop {
            if self.remaining == 0 {
                self.finish(EpisodeStatus::HorizonExhausted, log);
                return Ok(actions);
            }
            let pr = &self.compiled.problem;
            let decision = replan_step(pr, &self.state, self.remaining, self.turns.len(), solver, algorithm)?;
            let Some(name) = decision.op else {
                self.finish(EpisodeStatus::Completed, log);
                return Ok(actions);
            };
            match self.compiled.act(&name).expect("compiled operator") {
                DialogAct::Ask(i) => {
                    self.pending = Some(i);
                    self.status = SessionStatus::AwaitingUser;
                    return Ok(actions);
                }
                act => {
                    let op = pr.operator(&name).expect("known operator");
                    let predicted = self.state.with_effect(op.eff());
                    let turn = Turn::record(self.turns.len(), op, &self.gamma(), predicted.clone(), predicted);
                    let message = self.act_message(act);
                    actions.push(AgentAction::Act { op: name.clone(), message: message.clone() });
                    self.record(turn, TurnKind::Act, message, log);
                }
            }
        }
    }

    fn answer(
        &mut self,
        answer: &str,
        solver: &Solver,
        algorithm: Algorithm,
        log: &mut Vec<String>,
    ) -> Result<Vec<AgentAction>, ServiceError> {
        let Some(i) = self.pending.filter(|_| self.status == SessionStatus::AwaitingUser) else {
            return Err(ServiceError::Finished(self.id.clone()));
        };
        let slot = &self.spec.slots()[i];
        let Some(idx) = slot.answers.iter().position(|a| a == answer) else {
            return Err(ServiceError::IllegalAnswer {
                slot: slot.name.clone(),
                answer: answer.to_string(),
                allowed: slot.answers.clone(),
            });
        };
        let name = format!("ask_{}", slot.name);
        let op = self.compiled.problem.operator(&name).expect("ask operator");
        let predicted = self.state.with_effect(op.eff());
        let mut observed = predicted.values().to_vec();
        observed[i] = 1 + idx as u32;
        let turn = Turn::record(self.turns.len(), op, &self.gamma(), predicted, State::new(observed));
        let message = format!("{} {}", slot.prompt, answer);
        self.pending = None;
        self.record(turn, TurnKind::Ask, message, log);
        self.auto_advance(solver, algorithm, log)
    }

    fn reply(&self, actions: Vec<AgentAction>) -> Reply {
        Reply {
            session_id: self.id.clone(),
            action: self.pending_action().unwrap_or(AgentAction::Stop),
            actions,
            remaining: self.remaining,
            value: self.value(),
            status: self.status,
        }
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            session_id: self.id.clone(),
            status: self.status,
            remaining: self.remaining,
            value: self.value(),
            turns: self.turns.clone(),
            bindings: self.bindings(),
            pending: self.pending_action(),
        }
    }
}

/// All live sessions. Each session is behind its own lock, so operations on
/// different sessions never wait for each other.
pub struct SessionStore {
    config: ServiceConfig,
    solver: Solver,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

fn new_id() -> String {
    format!("{:032x}", rand::thread_rng().gen::<u128>())
}

impl SessionStore {
    pub fn new(config: ServiceConfig) -> Self {
        let solver = Solver::new(config.limits);
        SessionStore { config, solver, sessions: RwLock::new(HashMap::new()) }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn create(&self, source: SpecSource) -> Result<Reply, ServiceError> {
        let spec = match source {
            SpecSource::Text(text) => parse_dialog_spec(&text)?,
            SpecSource::Builtin(name) => builtin_spec(&name).ok_or_else(|| ServiceError::UnknownBuiltin {
                name,
                allowed: BUILTIN_SPECS.iter().map(|s| s.to_string()).collect(),
            })?,
        };
        let compiled = spec.compile(&self.config.limits)?;
        let mut session = Session {
            id: new_id(),
            state: compiled.problem.initial_state().clone(),
            remaining: compiled.problem.horizon(),
            spec,
            compiled,
            turns: Vec::new(),
            status: SessionStatus::AgentActing,
            pending: None,
            last_active: Instant::now(),
        };
        let mut log = vec![format!("session {} spec {}", session.id, session.spec.name())];
        let actions = session.auto_advance(&self.solver, self.config.algorithm, &mut log)?;
        let reply = session.reply(actions);
        self.persist(&session.id, &log);
        self.sessions.write().insert(session.id.clone(), Arc::new(Mutex::new(session)));
        Ok(reply)
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions.read().get(id).cloned().ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    /// Marks the session abandoned if it has been idle too long.
    fn expire(&self, s: &mut Session, now: Instant) {
        if s.status.outcome().is_none() && now.duration_since(s.last_active) >= self.config.idle_timeout {
            let mut log = Vec::new();
            s.finish(EpisodeStatus::UserAbandoned, &mut log);
            self.persist(&s.id, &log);
        }
    }

    /// Applies the user's answer to the outstanding ask. Illegal answers
    /// leave the session unchanged.
    pub fn advance(&self, id: &str, answer: &str) -> Result<Reply, ServiceError> {
        let cell = self.session(id)?;
        let mut s = cell.lock();
        let now = Instant::now();
        self.expire(&mut s, now);
        let mut log = Vec::new();
        let snapshot = (s.state.clone(), s.remaining, s.turns.len(), s.status, s.pending);
        match s.answer(answer, &self.solver, self.config.algorithm, &mut log) {
            Ok(actions) => {
                s.last_active = now;
                self.persist(id, &log);
                Ok(s.reply(actions))
            }
            Err(e) => {
                if !matches!(e, ServiceError::IllegalAnswer { .. } | ServiceError::Finished(_)) {
                    // solver refusal mid-advance: roll back to the pre-answer state
                    let (state, remaining, len, status, pending) = snapshot;
                    s.state = state;
                    s.remaining = remaining;
                    s.turns.truncate(len);
                    s.status = status;
                    s.pending = pending;
                }
                Err(e)
            }
        }
    }

    /// Ends the session as abandoned by the user.
    pub fn abandon(&self, id: &str) -> Result<Snapshot, ServiceError> {
        let cell = self.session(id)?;
        let mut s = cell.lock();
        if s.status.outcome().is_none() {
            let mut log = Vec::new();
            s.finish(EpisodeStatus::UserAbandoned, &mut log);
            self.persist(id, &log);
        }
        Ok(s.snapshot())
    }

    pub fn get(&self, id: &str) -> Result<Snapshot, ServiceError> {
        let cell = self.session(id)?;
        let mut s = cell.lock();
        self.expire(&mut s, Instant::now());
        Ok(s.snapshot())
    }

    /// Expires idle sessions; returns how many were expired.
    pub fn sweep(&self) -> usize {
        let now = Instant::now();
        let cells: Vec<_> = self.sessions.read().values().cloned().collect();
        cells
            .into_iter()
            .filter(|c| {
                let mut s = c.lock();
                let before = s.status;
                self.expire(&mut s, now);
                s.status != before
            })
            .count()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn persist(&self, id: &str, lines: &[String]) {
        let Some(dir) = &self.config.transcript_dir else { return };
        let path = dir.join(format!("{id}.transcript"));
        let written = OpenOptions::new().create(true).append(true).open(&path).and_then(|mut f| {
            for line in lines {
                writeln!(f, "{line}")?;
            }
            Ok(())
        });
        if let Err(e) = written {
            eprintln!("warning: cannot append to {}: {e}", path.display());
        }
    }
}
