//! Interleaved planning and execution.
//!
//! The executor solves from the current state with the remaining horizon,
//! executes the first operator of the optimal plan against an
//! [`Environment`], records predicted and observed states, and replans from
//! whatever was observed. Solvers work re-based (first remaining step has
//! weight 1); the executor books each turn with the global weight
//! `gamma^index`.

use std::fmt::{self, Write as _};

use crate::model::{Objective, Operator, Problem, State};
use crate::scalar::{pow, Scalar};
use crate::search::{Algorithm, SearchError, Solver};

/// Where executed operators meet the world.
pub trait Environment<T> {
    /// Observed outcome of executing `op` in `before`, given the planner's
    /// prediction.
    fn execute(&mut self, op: &Operator<T>, before: &State, predicted: &State) -> State;

    /// The user has left; no further turns happen.
    fn is_terminal(&self) -> bool {
        false
    }
}

/// Observes exactly what was predicted.
#[derive(Debug, Clone, Copy, Default)]
pub struct Faithful;

impl<T> Environment<T> for Faithful {
    fn execute(&mut self, _op: &Operator<T>, _before: &State, predicted: &State) -> State {
        predicted.clone()
    }
}

impl<T, E: Environment<T> + ?Sized> Environment<T> for &mut E {
    fn execute(&mut self, op: &Operator<T>, before: &State, predicted: &State) -> State {
        (**self).execute(op, before, predicted)
    }

    fn is_terminal(&self) -> bool {
        (**self).is_terminal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EpisodeStatus {
    /// The planner chose to stop.
    Completed,
    /// The environment went terminal.
    UserAbandoned,
    /// Every turn of the horizon was used.
    HorizonExhausted,
    /// The environment produced an ill-formed state.
    Aborted,
}

impl fmt::Display for EpisodeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EpisodeStatus::Completed => "completed",
            EpisodeStatus::UserAbandoned => "user_abandoned",
            EpisodeStatus::HorizonExhausted => "horizon_exhausted",
            EpisodeStatus::Aborted => "aborted",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Turn<T> {
    pub index: usize,
    pub op: String,
    pub predicted_state: State,
    pub observed_state: State,
    pub cost: T,
    pub utility: T,
    /// `gamma^index`, never re-based.
    pub discount_weight: T,
    /// `(utility - cost) * discount_weight`
    pub realized_contribution: T,
}

impl<T> Turn<T> {
    pub fn diverged(&self) -> bool {
        self.predicted_state != self.observed_state
    }
}

impl<T: Scalar> Turn<T> {
    /// Builds the bookkeeping for turn `index` of an episode.
    pub fn record(index: usize, op: &Operator<T>, gamma: &T, predicted: State, observed: State) -> Self {
        let weight = pow(gamma, index);
        Turn {
            index,
            op: op.name().to_string(),
            predicted_state: predicted,
            observed_state: observed,
            cost: op.cost().clone(),
            utility: op.utility().clone(),
            realized_contribution: op.net() * weight.clone(),
            discount_weight: weight,
        }
    }

    /// `turn index=<i> op=<name> cost=<c> utility=<u> weight=<w> contribution=<x> diverged=<yes|no>`
    pub fn transcript_line(&self) -> String {
        format!(
            "turn index={} op={} cost={} utility={} weight={} contribution={} diverged={}",
            self.index,
            self.op,
            self.cost,
            self.utility,
            self.discount_weight,
            self.realized_contribution,
            if self.diverged() { "yes" } else { "no" }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode<T> {
    pub turns: Vec<Turn<T>>,
    /// Sum of contributions, or total cost under `MinCost`.
    pub realized_value: T,
    pub status: EpisodeStatus,
    /// Diagnostic for [`EpisodeStatus::Aborted`].
    pub fault: Option<String>,
}

/// Realized value of a sequence of turns under `objective`.
pub fn realized_value<T: Scalar>(objective: &Objective<T>, turns: &[Turn<T>]) -> T {
    if objective.is_minimizing() {
        turns.iter().fold(T::zero(), |acc, t| acc + t.cost.clone())
    } else {
        turns.iter().fold(T::zero(), |acc, t| acc + t.realized_contribution.clone())
    }
}

impl<T: Scalar> Episode<T> {
    /// One line per turn and a trailer `realized_value=<v> status=<s>`.
    pub fn transcript(&self) -> String {
        let mut out = String::new();
        for t in &self.turns {
            out.push_str(&t.transcript_line());
            out.push('\n');
        }
        let _ = writeln!(out, "realized_value={} status={}", self.realized_value, self.status);
        out
    }
}

/// First step of an optimal plan from some intermediate state.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision<T> {
    /// `None` means stop.
    pub op: Option<String>,
    /// Optimal value from the state, re-based to weight 1.
    pub value: Option<T>,
    /// The same value in global terms: `gamma^global_offset * value` for the
    /// discounted objective, `value` otherwise.
    pub global_value: Option<T>,
}

/// Plans from `state` with `remaining` steps and returns the first operator
/// of the tie-broken optimal plan. The choice does not depend on
/// `global_offset`; scaling every suffix value by the same positive weight
/// keeps the maximizer.
pub fn replan_step<T: Scalar>(
    pr: &Problem<T>,
    state: &State,
    remaining: usize,
    global_offset: usize,
    solver: &Solver,
    algorithm: Algorithm,
) -> Result<Decision<T>, SearchError> {
    let res = solver.solve_from(algorithm, pr, state, remaining)?;
    let scale = match pr.objective() {
        Objective::Discounted { gamma } => pow(gamma, global_offset),
        _ => T::one(),
    };
    Ok(Decision {
        op: res.plan.first().map(str::to_string),
        global_value: res.value.clone().map(|v| v * scale),
        value: res.value,
    })
}

/// Runs plan-execute-replan until the planner stops, the environment goes
/// terminal or the horizon is used up.
pub fn run_episode<T: Scalar, E: Environment<T>>(
    pr: &Problem<T>,
    mut env: E,
    solver: &Solver,
    algorithm: Algorithm,
) -> Result<Episode<T>, SearchError> {
    let gamma = pr.objective().gamma();
    let mut state = pr.initial_state().clone();
    let mut remaining = pr.horizon();
    let mut turns: Vec<Turn<T>> = Vec::new();
    let mut fault = None;
    let status = loop {
        if env.is_terminal() {
            break EpisodeStatus::UserAbandoned;
        }
        if remaining == 0 {
            break EpisodeStatus::HorizonExhausted;
        }
        let decision = replan_step(pr, &state, remaining, turns.len(), solver, algorithm)?;
        let Some(name) = decision.op else {
            break EpisodeStatus::Completed;
        };
        let op = pr.operator(&name).expect("solver returns known operators");
        let predicted = state.with_effect(op.eff());
        let observed = env.execute(op, &state, &predicted);
        if let Err(e) = pr.check_state(&observed) {
            fault =
                Some(format!("turn {}: environment returned an ill-formed state after `{}`: {e}", turns.len(), name));
            break EpisodeStatus::Aborted;
        }
        turns.push(Turn::record(turns.len(), op, &gamma, predicted, observed.clone()));
        state = observed;
        remaining -= 1;
    };
    Ok(Episode { realized_value: realized_value(pr.objective(), &turns), turns, status, fault })
}
