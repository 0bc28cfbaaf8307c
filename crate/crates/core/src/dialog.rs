//! Dialog specifications and their compilation into planning problems.
//!
//! A dialog is described by slots the agent may ask the user about, data
//! queries that need some slots filled, and advisories that need some
//! queries run. Each becomes a dialog act (an operator): `ask_<slot>`,
//! `run_<query>__<answer>...` (one variant per combination of answers of
//! the required slots) and `advise_<advisory>`. The horizon is the turn
//! budget.
//!
//! Asking predicts the slot's default answer. The real answer is observed
//! at execution time, see [`DialogEnv`].

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec::Environment;
use crate::limits::Limits;
use crate::model::{
    is_identifier, is_value_token, ModelError, Objective, Operator, PartialState, Problem, State, ValueId, VariableDef,
};
use crate::scalar::{non_negative, Scalar};

/// Domain value of a slot variable before the slot is asked.
pub const UNKNOWN: &str = "unknown";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DialogError {
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("slot `{0}` has no answers")]
    NoAnswers(String),
    #[error("slot `{slot}` lists answer `{answer}` twice")]
    DuplicateAnswer { slot: String, answer: String },
    #[error("slot `{0}` may not use the reserved answer `unknown`")]
    ReservedAnswer(String),
    #[error("default answer `{answer}` of slot `{slot}` is not one of its answers")]
    BadDefault { slot: String, answer: String },
    #[error("unknown slot `{0}`")]
    UnknownSlot(String),
    #[error("unknown query `{0}`")]
    UnknownQuery(String),
    #[error("`{owner}` requires `{name}` twice")]
    DuplicateRequirement { owner: String, name: String },
    #[error("query `{0}` requires no slots")]
    EmptyRequirement(String),
    #[error("malformed placeholder in the message of `{0}`")]
    BadTemplate(String),
    #[error("negative cost or utility on `{0}`")]
    Negative(String),
    #[error("max_turns must be positive")]
    ZeroTurns,
    #[error("discount must lie in (0, 1]")]
    BadDiscount,
    #[error("compiling would produce {count} operators, limit is {limit}")]
    TooManyOperators { count: u64, limit: u64 },
    #[error("answer `{answer}` is not allowed for slot `{slot}`")]
    IllegalAnswer { slot: String, answer: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slot<T> {
    pub name: String,
    pub prompt: String,
    pub answers: Vec<String>,
    pub default_answer: String,
    pub ask_cost: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query<T> {
    pub name: String,
    /// Slot names, each listed once.
    pub requires: Vec<String>,
    pub run_cost: T,
    pub utility: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Advisory<T> {
    pub name: String,
    /// Query names, each listed once (may be empty).
    pub requires_queries: Vec<String>,
    /// Text with `{slot}` placeholders.
    pub message_template: String,
    pub cost: T,
    pub utility: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DialogSpec<T> {
    name: String,
    slots: Vec<Slot<T>>,
    queries: Vec<Query<T>>,
    advisories: Vec<Advisory<T>>,
    max_turns: usize,
    discount: Option<T>,
}

/// What a compiled operator does in dialog terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DialogAct {
    Ask(usize),
    Run(usize),
    Advise(usize),
}

/// Splits a message template into literal text and placeholder names.
pub fn template_placeholders(template: &str) -> Option<Vec<&str>> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find(['{', '}']) {
        if rest.as_bytes()[open] == b'}' {
            return None;
        }
        let after = &rest[open + 1..];
        let close = after.find('}')?;
        let name = &after[..close];
        if !is_identifier(name) {
            return None;
        }
        out.push(name);
        rest = &after[close + 1..];
    }
    Some(out)
}

impl<T: Scalar> DialogSpec<T> {
    pub fn new(
        name: impl Into<String>,
        slots: Vec<Slot<T>>,
        queries: Vec<Query<T>>,
        advisories: Vec<Advisory<T>>,
        max_turns: usize,
        discount: Option<T>,
    ) -> Result<Self, DialogError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(DialogError::BadIdentifier(name));
        }
        let mut names = HashSet::new();
        let all_names = slots
            .iter()
            .map(|s| &s.name)
            .chain(queries.iter().map(|q| &q.name))
            .chain(advisories.iter().map(|a| &a.name));
        for n in all_names {
            if !is_identifier(n) {
                return Err(DialogError::BadIdentifier(n.clone()));
            }
            if !names.insert(n.as_str()) {
                return Err(DialogError::DuplicateName(n.clone()));
            }
        }
        for slot in &slots {
            if slot.answers.is_empty() {
                return Err(DialogError::NoAnswers(slot.name.clone()));
            }
            let mut seen = HashSet::new();
            for a in &slot.answers {
                if !is_value_token(a) {
                    return Err(DialogError::BadIdentifier(a.clone()));
                }
                if a == UNKNOWN {
                    return Err(DialogError::ReservedAnswer(slot.name.clone()));
                }
                if !seen.insert(a) {
                    return Err(DialogError::DuplicateAnswer { slot: slot.name.clone(), answer: a.clone() });
                }
            }
            if !slot.answers.contains(&slot.default_answer) {
                return Err(DialogError::BadDefault { slot: slot.name.clone(), answer: slot.default_answer.clone() });
            }
            if !non_negative(&slot.ask_cost) {
                return Err(DialogError::Negative(slot.name.clone()));
            }
        }
        let slot_names: HashSet<&str> = slots.iter().map(|s| s.name.as_str()).collect();
        for q in &queries {
            if q.requires.is_empty() {
                return Err(DialogError::EmptyRequirement(q.name.clone()));
            }
            check_refs(&q.name, &q.requires, &slot_names, DialogError::UnknownSlot)?;
            if !non_negative(&q.run_cost) || !non_negative(&q.utility) {
                return Err(DialogError::Negative(q.name.clone()));
            }
        }
        let query_names: HashSet<&str> = queries.iter().map(|q| q.name.as_str()).collect();
        for a in &advisories {
            check_refs(&a.name, &a.requires_queries, &query_names, DialogError::UnknownQuery)?;
            let holes =
                template_placeholders(&a.message_template).ok_or_else(|| DialogError::BadTemplate(a.name.clone()))?;
            if let Some(h) = holes.iter().find(|h| !slot_names.contains(*h)) {
                return Err(DialogError::UnknownSlot(h.to_string()));
            }
            if !non_negative(&a.cost) || !non_negative(&a.utility) {
                return Err(DialogError::Negative(a.name.clone()));
            }
        }
        if max_turns == 0 {
            return Err(DialogError::ZeroTurns);
        }
        if let Some(g) = &discount {
            if !(*g > T::zero() && *g <= T::one()) {
                return Err(DialogError::BadDiscount);
            }
        }
        Ok(DialogSpec { name, slots, queries, advisories, max_turns, discount })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn slots(&self) -> &[Slot<T>] {
        &self.slots
    }

    pub fn queries(&self) -> &[Query<T>] {
        &self.queries
    }

    pub fn advisories(&self) -> &[Advisory<T>] {
        &self.advisories
    }

    pub fn max_turns(&self) -> usize {
        self.max_turns
    }

    pub fn discount(&self) -> Option<&T> {
        self.discount.as_ref()
    }

    pub fn slot(&self, name: &str) -> Option<&Slot<T>> {
        self.slots.iter().find(|s| s.name == name)
    }

    pub fn with_max_turns(&self, max_turns: usize) -> Result<Self, DialogError> {
        Self::new(
            self.name.clone(),
            self.slots.clone(),
            self.queries.clone(),
            self.advisories.clone(),
            max_turns,
            self.discount.clone(),
        )
    }

    pub fn with_discount(&self, discount: Option<T>) -> Result<Self, DialogError> {
        Self::new(
            self.name.clone(),
            self.slots.clone(),
            self.queries.clone(),
            self.advisories.clone(),
            self.max_turns,
            discount,
        )
    }

    pub fn with_slot_cost(&self, slot: &str, ask_cost: T) -> Result<Self, DialogError> {
        let mut slots = self.slots.clone();
        let s = slots.iter_mut().find(|s| s.name == slot).ok_or_else(|| DialogError::UnknownSlot(slot.to_string()))?;
        s.ask_cost = ask_cost;
        Self::new(
            self.name.clone(),
            slots,
            self.queries.clone(),
            self.advisories.clone(),
            self.max_turns,
            self.discount.clone(),
        )
    }

    /// `slots + sum over queries of the product of required answer counts +
    /// advisories`, saturating.
    pub fn operator_count(&self) -> u64 {
        let variants: u64 = self
            .queries
            .iter()
            .map(|q| {
                q.requires
                    .iter()
                    .map(|s| self.slot(s).map_or(1, |s| s.answers.len() as u64))
                    .fold(1u64, u64::saturating_mul)
            })
            .fold(0u64, u64::saturating_add);
        (self.slots.len() as u64).saturating_add(variants).saturating_add(self.advisories.len() as u64)
    }

    pub fn compile(&self, limits: &Limits) -> Result<CompiledDialog<T>, DialogError> {
        let count = self.operator_count();
        if count > limits.dialog_ops {
            return Err(DialogError::TooManyOperators { count, limit: limits.dialog_ops });
        }
        let n_slots = self.slots.len();
        let n_queries = self.queries.len();
        let slot_var: HashMap<&str, usize> = self.slots.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect();
        let query_var: HashMap<&str, usize> =
            self.queries.iter().enumerate().map(|(i, q)| (q.name.as_str(), n_slots + i)).collect();

        let mut variables = Vec::new();
        for s in &self.slots {
            let domain = std::iter::once(UNKNOWN.to_string()).chain(s.answers.iter().cloned());
            variables.push(VariableDef::new(format!("slot_{}", s.name), domain)?);
        }
        for q in &self.queries {
            variables.push(VariableDef::new(format!("done_{}", q.name), ["no", "yes"])?);
        }
        for a in &self.advisories {
            variables.push(VariableDef::new(format!("given_{}", a.name), ["no", "yes"])?);
        }
        const NO: ValueId = 0;
        const YES: ValueId = 1;

        let mut operators = Vec::with_capacity(count as usize);
        let mut acts = HashMap::new();
        for (i, s) in self.slots.iter().enumerate() {
            let default = 1 + s.answers.iter().position(|a| *a == s.default_answer).expect("validated") as ValueId;
            let name = format!("ask_{}", s.name);
            acts.insert(name.clone(), DialogAct::Ask(i));
            operators.push(Operator::new(
                name,
                PartialState::from_bindings([(i, 0)])?,
                PartialState::from_bindings([(i, default)])?,
                s.ask_cost.clone(),
                T::zero(),
            )?);
        }
        for (j, q) in self.queries.iter().enumerate() {
            let done = n_slots + j;
            // required slots in declaration order
            let mut required: Vec<usize> = q.requires.iter().map(|s| slot_var[s.as_str()]).collect();
            required.sort_unstable();
            let radices: Vec<usize> = required.iter().map(|&v| self.slots[v].answers.len()).collect();
            let variants: usize = radices.iter().product();
            for n in 0..variants {
                // mixed-radix decode, last required slot varies fastest
                let mut combo = vec![0usize; radices.len()];
                let mut rest = n;
                for p in (0..radices.len()).rev() {
                    combo[p] = rest % radices[p];
                    rest /= radices[p];
                }
                let mut name = format!("run_{}", q.name);
                let mut pre = vec![(done, NO)];
                for (&var, &a) in required.iter().zip(&combo) {
                    name.push_str("__");
                    name.push_str(&self.slots[var].answers[a]);
                    pre.push((var, 1 + a as ValueId));
                }
                acts.insert(name.clone(), DialogAct::Run(j));
                operators.push(Operator::new(
                    name,
                    PartialState::from_bindings(pre)?,
                    PartialState::from_bindings([(done, YES)])?,
                    q.run_cost.clone(),
                    q.utility.clone(),
                )?);
            }
        }
        for (k, a) in self.advisories.iter().enumerate() {
            let given = n_slots + n_queries + k;
            let mut pre = vec![(given, NO)];
            pre.extend(a.requires_queries.iter().map(|q| (query_var[q.as_str()], YES)));
            let name = format!("advise_{}", a.name);
            acts.insert(name.clone(), DialogAct::Advise(k));
            operators.push(Operator::new(
                name,
                PartialState::from_bindings(pre)?,
                PartialState::from_bindings([(given, YES)])?,
                a.cost.clone(),
                a.utility.clone(),
            )?);
        }

        let s0 = State::new(vec![0; variables.len()]);
        let objective = match &self.discount {
            Some(gamma) => Objective::Discounted { gamma: gamma.clone() },
            None => Objective::NetBenefit,
        };
        let problem = Problem::new(self.name.clone(), variables, operators, s0, self.max_turns, objective)?;
        Ok(CompiledDialog { problem, acts })
    }

    /// Fills `{slot}` placeholders from `bindings`; unbound slots render as
    /// `?`.
    pub fn render(&self, template: &str, bindings: &HashMap<String, String>) -> String {
        let mut out = String::with_capacity(template.len());
        let mut rest = template;
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let after = &rest[open + 1..];
            match after.find('}') {
                Some(close) => {
                    let name = &after[..close];
                    out.push_str(bindings.get(name).map_or("?", String::as_str));
                    rest = &after[close + 1..];
                }
                None => {
                    out.push_str(&rest[open..]);
                    rest = "";
                }
            }
        }
        out.push_str(rest);
        out
    }
}

fn check_refs(
    owner: &str,
    refs: &[String],
    known: &HashSet<&str>,
    unknown: fn(String) -> DialogError,
) -> Result<(), DialogError> {
    let mut seen = HashSet::new();
    for r in refs {
        if !known.contains(r.as_str()) {
            return Err(unknown(r.clone()));
        }
        if !seen.insert(r) {
            return Err(DialogError::DuplicateRequirement { owner: owner.to_string(), name: r.clone() });
        }
    }
    Ok(())
}

/// Compiles with default limits.
pub fn compile_dialog<T: Scalar>(ds: &DialogSpec<T>) -> Result<Problem<T>, DialogError> {
    Ok(ds.compile(&Limits::default())?.problem)
}

/// A compiled dialog: the planning problem plus the act behind each
/// operator name.
#[derive(Debug, Clone)]
pub struct CompiledDialog<T> {
    pub problem: Problem<T>,
    acts: HashMap<String, DialogAct>,
}

impl<T: Scalar> CompiledDialog<T> {
    pub fn act(&self, op_name: &str) -> Option<DialogAct> {
        self.acts.get(op_name).copied()
    }
}

/// A simulated user: fixed answers per slot, or seeded random answers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimUser {
    /// Slots missing from the script are answered with their default.
    Scripted(HashMap<String, String>),
    Random {
        seed: u64,
    },
}

impl SimUser {
    pub fn scripted<'a>(answers: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        SimUser::Scripted(answers.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect())
    }
}

/// Environment answering `ask_*` acts like the simulated user and every
/// other act exactly as predicted.
pub struct DialogEnv<T> {
    spec: DialogSpec<T>,
    acts: HashMap<String, DialogAct>,
    user: SimUser,
    rng: ChaCha8Rng,
    answers: Vec<(String, String)>,
}

pub fn make_sim_env<T: Scalar>(ds: &DialogSpec<T>, user: SimUser) -> Result<DialogEnv<T>, DialogError> {
    if let SimUser::Scripted(script) = &user {
        for (slot, answer) in script {
            let s = ds.slot(slot).ok_or_else(|| DialogError::UnknownSlot(slot.clone()))?;
            if !s.answers.contains(answer) {
                return Err(DialogError::IllegalAnswer { slot: slot.clone(), answer: answer.clone() });
            }
        }
    }
    let compiled = ds.compile(&Limits { dialog_ops: u64::MAX, ..Limits::default() })?;
    let seed = match &user {
        SimUser::Random { seed } => *seed,
        SimUser::Scripted(_) => 0,
    };
    Ok(DialogEnv {
        spec: ds.clone(),
        acts: compiled.acts,
        user,
        rng: ChaCha8Rng::seed_from_u64(seed),
        answers: Vec::new(),
    })
}

impl<T: Scalar> DialogEnv<T> {
    /// `(slot, answer)` pairs given so far.
    pub fn answers(&self) -> &[(String, String)] {
        &self.answers
    }

    fn answer_for(&mut self, slot: usize) -> usize {
        let s = &self.spec.slots[slot];
        match &self.user {
            SimUser::Scripted(script) => {
                let answer = script.get(&s.name).unwrap_or(&s.default_answer);
                s.answers.iter().position(|a| a == answer).expect("validated script")
            }
            SimUser::Random { .. } => self.rng.gen_range(0..s.answers.len()),
        }
    }
}

impl<T: Scalar> Environment<T> for DialogEnv<T> {
    fn execute(&mut self, op: &Operator<T>, _before: &State, predicted: &State) -> State {
        match self.acts.get(op.name()) {
            Some(&DialogAct::Ask(slot)) => {
                let answer = self.answer_for(slot);
                let s = &self.spec.slots[slot];
                self.answers.push((s.name.clone(), s.answers[answer].clone()));
                let mut values = predicted.values().to_vec();
                values[slot] = 1 + answer as ValueId;
                State::new(values)
            }
            _ => predicted.clone(),
        }
    }
}

/// Slot name to answer, read off a state of a compiled dialog.
pub fn slot_bindings<T: Scalar>(ds: &DialogSpec<T>, state: &State) -> HashMap<String, String> {
    ds.slots
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let v = state.get(i) as usize;
            (v > 0).then(|| (s.name.clone(), s.answers[v - 1].clone()))
        })
        .collect()
}
