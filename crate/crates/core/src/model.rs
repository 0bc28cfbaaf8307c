//! Planning semantics: finite-domain variables, partial and complete states,
//! operators with cost and utility, bounded-length plans and their objectives.
//!
//! Values are stored by index into their variable's domain (declaration
//! order), so a [`State`] is a dense vector and hashes canonically.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::scalar::{non_negative, Scalar};

/// Index of a value inside its variable's domain.
pub type ValueId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("variable `{var}` lists value `{value}` twice")]
    DuplicateValue { var: String, value: String },
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate operator `{0}`")]
    DuplicateOperator(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value `{value}` is not in the domain of `{var}`")]
    UnknownValue { var: String, value: String },
    #[error("variable `{0}` is bound twice")]
    DuplicateBinding(String),
    #[error("state does not bind variable `{0}`")]
    IncompleteState(String),
    #[error("state has {found} entries but the problem has {expected} variables")]
    StateArity { expected: usize, found: usize },
    #[error("partial state refers to variable index {0} which does not exist")]
    VariableOutOfRange(usize),
    #[error("value index {value} is outside the domain of `{var}`")]
    ValueOutOfRange { var: String, value: ValueId },
    #[error("operator `{0}` has a negative cost")]
    NegativeCost(String),
    #[error("operator `{0}` has a negative utility")]
    NegativeUtility(String),
    #[error("discount factor must lie in (0, 1]")]
    BadGamma,
    #[error("horizon must be positive")]
    ZeroHorizon,
    #[error("operator `{0}` is not applicable")]
    PreconditionViolated(String),
    #[error("plan has {len} steps but the horizon is {horizon}")]
    HorizonExceeded { len: usize, horizon: usize },
    #[error("step {step} (`{op}`) is not applicable")]
    InvalidAtStep { step: usize, op: String },
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

/// `[A-Za-z_][A-Za-z0-9_-]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Domain values may additionally start with a digit (`0`, `1`, `2nd`).
pub fn is_value_token(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableDef {
    name: String,
    domain: Vec<String>,
}

impl VariableDef {
    pub fn new<S: Into<String>>(name: impl Into<String>, domain: impl IntoIterator<Item = S>) -> Result<Self> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(ModelError::BadIdentifier(name));
        }
        let domain: Vec<String> = domain.into_iter().map(Into::into).collect();
        if domain.is_empty() {
            return Err(ModelError::EmptyDomain(name));
        }
        let mut seen = HashSet::new();
        for v in &domain {
            if !is_value_token(v) {
                return Err(ModelError::BadIdentifier(v.clone()));
            }
            if !seen.insert(v.as_str()) {
                return Err(ModelError::DuplicateValue { var: name, value: v.clone() });
            }
        }
        Ok(VariableDef { name, domain })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn value_index(&self, value: &str) -> Option<ValueId> {
        self.domain.iter().position(|v| v == value).map(|i| i as ValueId)
    }

    pub fn value_name(&self, value: ValueId) -> Option<&str> {
        self.domain.get(value as usize).map(String::as_str)
    }
}

/// Assignment to a subset of the variables, kept sorted by variable index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PartialState {
    bindings: Vec<(usize, ValueId)>,
}

impl PartialState {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a partial state from `(variable index, value index)` pairs.
    /// Fails if a variable is bound twice; range checks happen against a
    /// problem (see [`Problem::check_partial`]).
    pub fn from_bindings(bindings: impl IntoIterator<Item = (usize, ValueId)>) -> Result<Self> {
        let mut bindings: Vec<_> = bindings.into_iter().collect();
        bindings.sort_unstable();
        for w in bindings.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(ModelError::DuplicateBinding(format!("#{}", w[0].0)));
            }
        }
        Ok(PartialState { bindings })
    }

    pub fn bindings(&self) -> &[(usize, ValueId)] {
        &self.bindings
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, var: usize) -> Option<ValueId> {
        self.bindings.binary_search_by_key(&var, |&(v, _)| v).ok().map(|i| self.bindings[i].1)
    }
}

/// Complete assignment: one value index per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(Vec<ValueId>);

impl State {
    pub fn new(values: Vec<ValueId>) -> Self {
        State(values)
    }

    pub fn values(&self) -> &[ValueId] {
        &self.0
    }

    pub fn get(&self, var: usize) -> ValueId {
        self.0[var]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Unchecked consistency test. Bindings past the end of the state count
    /// as mismatches.
    pub fn agrees_with(&self, partial: &PartialState) -> bool {
        partial.bindings.iter().all(|&(var, val)| self.0.get(var) == Some(&val))
    }

    /// Unchecked transition: overwrite every variable bound by `effect`.
    pub fn with_effect(&self, effect: &PartialState) -> State {
        let mut next = self.0.clone();
        for &(var, val) in &effect.bindings {
            next[var] = val;
        }
        State(next)
    }

    /// Variables on which the two states differ.
    pub fn diff(&self, other: &State) -> Vec<usize> {
        self.0.iter().zip(&other.0).enumerate().filter_map(|(i, (a, b))| (a != b).then_some(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T> {
    name: String,
    pre: PartialState,
    eff: PartialState,
    cost: T,
    utility: T,
}

impl<T: Scalar> Operator<T> {
    pub fn new(name: impl Into<String>, pre: PartialState, eff: PartialState, cost: T, utility: T) -> Result<Self> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(ModelError::BadIdentifier(name));
        }
        if !non_negative(&cost) {
            return Err(ModelError::NegativeCost(name));
        }
        if !non_negative(&utility) {
            return Err(ModelError::NegativeUtility(name));
        }
        Ok(Operator { name, pre, eff, cost, utility })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pre(&self) -> &PartialState {
        &self.pre
    }

    pub fn eff(&self) -> &PartialState {
        &self.eff
    }

    pub fn cost(&self) -> &T {
        &self.cost
    }

    pub fn utility(&self) -> &T {
        &self.utility
    }

    /// `utility - cost`
    pub fn net(&self) -> T {
        self.utility.clone() - self.cost.clone()
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Operator<U> {
        Operator {
            name: self.name.clone(),
            pre: self.pre.clone(),
            eff: self.eff.clone(),
            cost: f(&self.cost),
            utility: f(&self.utility),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    MinCost,
    NetBenefit,
    DiscountedNetBenefit,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::MinCost => "mincost",
            ObjectiveKind::NetBenefit => "netbenefit",
            ObjectiveKind::DiscountedNetBenefit => "discounted",
        })
    }
}

impl std::str::FromStr for ObjectiveKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mincost" => Ok(ObjectiveKind::MinCost),
            "netbenefit" => Ok(ObjectiveKind::NetBenefit),
            "discounted" => Ok(ObjectiveKind::DiscountedNetBenefit),
            other => Err(format!("unknown objective `{other}` (expected mincost, netbenefit or discounted)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective<T> {
    /// Minimize total cost of a plan reaching `goal`. Without a goal the
    /// empty plan is trivially optimal.
    MinCost { goal: Option<PartialState> },
    /// Maximize total utility minus total cost.
    NetBenefit,
    /// Maximize `sum_i (r(o_i) - c(o_i)) * gamma^i`, `i` counted from 0.
    Discounted { gamma: T },
}

impl<T: Scalar> Objective<T> {
    pub fn kind(&self) -> ObjectiveKind {
        match self {
            Objective::MinCost { .. } => ObjectiveKind::MinCost,
            Objective::NetBenefit => ObjectiveKind::NetBenefit,
            Objective::Discounted { .. } => ObjectiveKind::DiscountedNetBenefit,
        }
    }

    /// Discount factor; one for undiscounted objectives.
    pub fn gamma(&self) -> T {
        match self {
            Objective::Discounted { gamma } => gamma.clone(),
            _ => T::one(),
        }
    }

    pub fn goal(&self) -> Option<&PartialState> {
        match self {
            Objective::MinCost { goal } => goal.as_ref(),
            _ => None,
        }
    }

    pub fn is_minimizing(&self) -> bool {
        matches!(self, Objective::MinCost { .. })
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Objective<U> {
        match self {
            Objective::MinCost { goal } => Objective::MinCost { goal: goal.clone() },
            Objective::NetBenefit => Objective::NetBenefit,
            Objective::Discounted { gamma } => Objective::Discounted { gamma: f(gamma) },
        }
    }
}

/// Sequence of operator names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Plan {
    steps: Vec<String>,
}

impl Plan {
    pub fn new<S: Into<String>>(steps: impl IntoIterator<Item = S>) -> Self {
        Plan { steps: steps.into_iter().map(Into::into).collect() }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> &[String] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn first(&self) -> Option<&str> {
        self.steps.first().map(String::as_str)
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.steps.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanEval<T> {
    pub total_cost: T,
    pub total_utility: T,
    pub net_benefit: T,
    /// Equals `net_benefit` unless the objective is discounted with gamma < 1.
    pub discounted_net: T,
    pub final_state: State,
}

impl<T: Scalar> PlanEval<T> {
    /// The number the problem's objective optimizes: total cost for
    /// `MinCost`, net benefit or discounted net benefit otherwise.
    pub fn objective_value(&self, objective: &Objective<T>) -> T {
        match objective {
            Objective::MinCost { .. } => self.total_cost.clone(),
            Objective::NetBenefit => self.net_benefit.clone(),
            Objective::Discounted { .. } => self.discounted_net.clone(),
        }
    }
}

/// A bounded-length planning problem: variables, operators, initial state,
/// horizon and objective.
///
/// Operators are kept sorted by name, so operator indices follow the
/// lexicographic order used for tie-breaking.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem<T> {
    name: String,
    variables: Vec<VariableDef>,
    operators: Vec<Operator<T>>,
    s0: State,
    horizon: usize,
    objective: Objective<T>,
}

impl<T: Scalar> Problem<T> {
    pub fn new(
        name: impl Into<String>,
        variables: Vec<VariableDef>,
        mut operators: Vec<Operator<T>>,
        s0: State,
        horizon: usize,
        objective: Objective<T>,
    ) -> Result<Self> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(ModelError::BadIdentifier(name));
        }
        let mut seen = HashSet::new();
        for v in &variables {
            if !seen.insert(v.name()) {
                return Err(ModelError::DuplicateVariable(v.name().to_string()));
            }
        }
        operators.sort_by(|a, b| a.name.cmp(&b.name));
        for w in operators.windows(2) {
            if w[0].name == w[1].name {
                return Err(ModelError::DuplicateOperator(w[0].name.clone()));
            }
        }
        if horizon == 0 {
            return Err(ModelError::ZeroHorizon);
        }
        let pr = Problem { name, variables, operators, s0, horizon, objective };
        pr.check_state(&pr.s0)?;
        for op in &pr.operators {
            pr.check_partial(&op.pre)?;
            pr.check_partial(&op.eff)?;
            if !non_negative(&op.cost) {
                return Err(ModelError::NegativeCost(op.name.clone()));
            }
            if !non_negative(&op.utility) {
                return Err(ModelError::NegativeUtility(op.name.clone()));
            }
        }
        match &pr.objective {
            Objective::MinCost { goal: Some(goal) } => pr.check_partial(goal)?,
            Objective::Discounted { gamma } if !(*gamma > T::zero() && *gamma <= T::one()) => {
                return Err(ModelError::BadGamma)
            }
            _ => {}
        }
        Ok(pr)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[VariableDef] {
        &self.variables
    }

    pub fn operators(&self) -> &[Operator<T>] {
        &self.operators
    }

    pub fn initial_state(&self) -> &State {
        &self.s0
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn objective(&self) -> &Objective<T> {
        &self.objective
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn operator_index(&self, name: &str) -> Option<usize> {
        self.operators.binary_search_by(|o| o.name.as_str().cmp(name)).ok()
    }

    pub fn operator(&self, name: &str) -> Option<&Operator<T>> {
        self.operator_index(name).map(|i| &self.operators[i])
    }

    /// Same problem started from `start` with `horizon` steps left.
    pub fn with_start(&self, start: State, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(ModelError::ZeroHorizon);
        }
        self.check_state(&start)?;
        Ok(Problem { s0: start, horizon, ..self.clone() })
    }

    pub fn with_objective(&self, objective: Objective<T>) -> Result<Self> {
        Problem::new(
            self.name.clone(),
            self.variables.clone(),
            self.operators.clone(),
            self.s0.clone(),
            self.horizon,
            objective,
        )
    }

    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        self.with_start(self.s0.clone(), horizon)
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Problem<U> {
        Problem {
            name: self.name.clone(),
            variables: self.variables.clone(),
            operators: self.operators.iter().map(|o| o.map_scalar(&f)).collect(),
            s0: self.s0.clone(),
            horizon: self.horizon,
            objective: self.objective.map_scalar(&f),
        }
    }

    pub fn check_partial(&self, p: &PartialState) -> Result<()> {
        for &(var, val) in &p.bindings {
            let def = self.variables.get(var).ok_or(ModelError::VariableOutOfRange(var))?;
            if val as usize >= def.domain.len() {
                return Err(ModelError::ValueOutOfRange { var: def.name.clone(), value: val });
            }
        }
        Ok(())
    }

    pub fn check_state(&self, s: &State) -> Result<()> {
        if s.0.len() != self.variables.len() {
            return Err(ModelError::StateArity { expected: self.variables.len(), found: s.0.len() });
        }
        for (def, &val) in self.variables.iter().zip(&s.0) {
            if val as usize >= def.domain.len() {
                return Err(ModelError::ValueOutOfRange { var: def.name.clone(), value: val });
            }
        }
        Ok(())
    }

    /// Resolves `(variable, value)` name pairs into a partial state.
    pub fn partial_from_names<'a>(
        &self,
        bindings: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<PartialState> {
        resolve_bindings(&self.variables, bindings)
    }

    /// Resolves a total assignment given by name.
    pub fn state_from_names<'a>(&self, bindings: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<State> {
        let partial = self.partial_from_names(bindings)?;
        total_state(&self.variables, &partial)
    }

    /// `x=0 y=1`
    pub fn describe_state(&self, s: &State) -> String {
        self.variables
            .iter()
            .zip(&s.0)
            .map(|(def, &val)| format!("{}={}", def.name, def.value_name(val).unwrap_or("?")))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn describe_partial(&self, p: &PartialState) -> String {
        p.bindings
            .iter()
            .map(|&(var, val)| {
                let def = &self.variables[var];
                format!("{}={}", def.name, def.value_name(val).unwrap_or("?"))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// True iff every variable bound in `p` has the same value in `s`.
    pub fn consistent(&self, p: &PartialState, s: &State) -> Result<bool> {
        self.check_partial(p)?;
        self.check_state(s)?;
        Ok(s.agrees_with(p))
    }

    pub fn applicable(&self, op: &Operator<T>, s: &State) -> Result<bool> {
        self.consistent(&op.pre, s)
    }

    pub fn apply(&self, op: &Operator<T>, s: &State) -> Result<State> {
        self.check_partial(&op.eff)?;
        if !self.applicable(op, s)? {
            return Err(ModelError::PreconditionViolated(op.name.clone()));
        }
        Ok(s.with_effect(&op.eff))
    }

    /// Resolves names and checks applicability along the roll-out from the
    /// initial state. Returns operator indices and the final state.
    pub fn resolve_plan(&self, plan: &Plan) -> Result<(Vec<usize>, State)> {
        if plan.len() > self.horizon {
            return Err(ModelError::HorizonExceeded { len: plan.len(), horizon: self.horizon });
        }
        let mut indices = Vec::with_capacity(plan.len());
        let mut state = self.s0.clone();
        for (step, name) in plan.steps.iter().enumerate() {
            let idx = self.operator_index(name).ok_or_else(|| ModelError::UnknownOperator(name.clone()))?;
            let op = &self.operators[idx];
            if !state.agrees_with(&op.pre) {
                return Err(ModelError::InvalidAtStep { step, op: name.clone() });
            }
            state = state.with_effect(&op.eff);
            indices.push(idx);
        }
        Ok((indices, state))
    }

    /// Checks the plan and evaluates it. The empty plan is always valid.
    pub fn validate_plan(&self, plan: &Plan) -> Result<PlanEval<T>> {
        let (indices, final_state) = self.resolve_plan(plan)?;
        Ok(self.evaluate_indices(&indices, final_state))
    }

    /// Cost, utility, net benefit and discounted net benefit of a valid plan.
    pub fn evaluate_plan(&self, plan: &Plan) -> Result<PlanEval<T>> {
        self.validate_plan(plan)
    }

    fn evaluate_indices(&self, indices: &[usize], final_state: State) -> PlanEval<T> {
        let gamma = self.objective.gamma();
        let mut total_cost = T::zero();
        let mut total_utility = T::zero();
        let mut discounted_net = T::zero();
        let mut weight = T::one();
        for &i in indices {
            let op = &self.operators[i];
            total_cost = total_cost + op.cost.clone();
            total_utility = total_utility + op.utility.clone();
            discounted_net = discounted_net + op.net() * weight.clone();
            weight = weight * gamma.clone();
        }
        PlanEval {
            net_benefit: total_utility.clone() - total_cost.clone(),
            total_cost,
            total_utility,
            discounted_net,
            final_state,
        }
    }
}

pub(crate) fn resolve_bindings<'a>(
    variables: &[VariableDef],
    bindings: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<PartialState> {
    let mut out: Vec<(usize, ValueId)> = Vec::new();
    for (var, value) in bindings {
        let idx =
            variables.iter().position(|v| v.name == var).ok_or_else(|| ModelError::UnknownVariable(var.to_string()))?;
        let val = variables[idx]
            .value_index(value)
            .ok_or_else(|| ModelError::UnknownValue { var: var.to_string(), value: value.to_string() })?;
        if out.iter().any(|&(v, _)| v == idx) {
            return Err(ModelError::DuplicateBinding(var.to_string()));
        }
        out.push((idx, val));
    }
    out.sort_unstable();
    Ok(PartialState { bindings: out })
}

pub(crate) fn total_state(variables: &[VariableDef], partial: &PartialState) -> Result<State> {
    if let Some(missing) = variables.iter().enumerate().find(|(i, _)| partial.get(*i).is_none()) {
        return Err(ModelError::IncompleteState(missing.1.name.clone()));
    }
    Ok(State(partial.bindings.iter().map(|&(_, v)| v).collect()))
}

/// Name-based construction, mostly for tests and generated instances.
#[derive(Debug, Clone)]
pub struct ProblemBuilder<T> {
    name: String,
    variables: Vec<(String, Vec<String>)>,
    operators: Vec<RawOperator<T>>,
    init: Vec<(String, String)>,
    horizon: usize,
    objective: RawObjective<T>,
}

#[derive(Debug, Clone)]
struct RawOperator<T> {
    name: String,
    pre: Vec<(String, String)>,
    eff: Vec<(String, String)>,
    cost: T,
    utility: T,
}

#[derive(Debug, Clone)]
enum RawObjective<T> {
    MinCost(Option<Vec<(String, String)>>),
    NetBenefit,
    Discounted(T),
}

fn owned_pairs(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

impl<T: Scalar> ProblemBuilder<T> {
    pub fn new(name: impl Into<String>) -> Self {
        ProblemBuilder {
            name: name.into(),
            variables: Vec::new(),
            operators: Vec::new(),
            init: Vec::new(),
            horizon: 1,
            objective: RawObjective::NetBenefit,
        }
    }

    pub fn variable(mut self, name: &str, domain: &[&str]) -> Self {
        self.variables.push((name.to_string(), domain.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn operator(mut self, name: &str, pre: &[(&str, &str)], eff: &[(&str, &str)], cost: T, utility: T) -> Self {
        self.operators.push(RawOperator {
            name: name.to_string(),
            pre: owned_pairs(pre),
            eff: owned_pairs(eff),
            cost,
            utility,
        });
        self
    }

    pub fn init(mut self, bindings: &[(&str, &str)]) -> Self {
        self.init = owned_pairs(bindings);
        self
    }

    pub fn horizon(mut self, k: usize) -> Self {
        self.horizon = k;
        self
    }

    pub fn net_benefit(mut self) -> Self {
        self.objective = RawObjective::NetBenefit;
        self
    }

    pub fn discounted(mut self, gamma: T) -> Self {
        self.objective = RawObjective::Discounted(gamma);
        self
    }

    pub fn min_cost(mut self, goal: Option<&[(&str, &str)]>) -> Self {
        self.objective = RawObjective::MinCost(goal.map(owned_pairs));
        self
    }

    pub fn build(self) -> Result<Problem<T>> {
        let variables = self.variables.into_iter().map(|(n, d)| VariableDef::new(n, d)).collect::<Result<Vec<_>>>()?;
        let pairs =
            |v: &[(String, String)]| resolve_bindings(&variables, v.iter().map(|(a, b)| (a.as_str(), b.as_str())));
        let mut operators = Vec::with_capacity(self.operators.len());
        for raw in &self.operators {
            operators.push(Operator::new(
                raw.name.clone(),
                pairs(&raw.pre)?,
                pairs(&raw.eff)?,
                raw.cost.clone(),
                raw.utility.clone(),
            )?);
        }
        let s0 = total_state(&variables, &pairs(&self.init)?)?;
        let objective = match &self.objective {
            RawObjective::NetBenefit => Objective::NetBenefit,
            RawObjective::Discounted(g) => Objective::Discounted { gamma: g.clone() },
            RawObjective::MinCost(goal) => Objective::MinCost { goal: goal.as_ref().map(|g| pairs(g)).transpose()? },
        };
        Problem::new(self.name, variables, operators, s0, self.horizon, objective)
    }
}

/// Tie-break order shared by the solvers: better value first, then shorter
/// plan. Equal keys fall through to discovery order, which the solvers keep
/// lexicographic in operator names.
pub(crate) fn improves<T: Scalar>(minimize: bool, cand: (&T, usize), incumbent: (&T, usize)) -> bool {
    match cand.0.partial_cmp(incumbent.0) {
        Some(Ordering::Greater) => !minimize,
        Some(Ordering::Less) => minimize,
        Some(Ordering::Equal) => cand.1 < incumbent.1,
        None => false,
    }
}
