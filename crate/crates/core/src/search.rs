//! Exact solvers for the three objectives and exact Pareto-front enumeration.
//!
//! Three independent routes compute the same optimum:
//!
//! * [`Solver::brute`] enumerates every valid plan depth-first;
//! * [`Solver::dp`] runs backward induction over `(state, remaining steps)`;
//! * [`Solver::bnb`] is a depth-first branch-and-bound with a
//!   precondition-free bound and a dominance memo on `(state, depth)`.
//!
//! Stopping is always allowed, so the empty plan is a candidate everywhere.
//! Ties are broken the same way by all solvers: better objective value, then
//! shorter plan, then the lexicographically smaller sequence of operator
//! names. Operators are stored in name order, so visiting them by index and
//! keeping the first of equally good candidates yields the lexicographic
//! minimum.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::limits::Limits;
use crate::model::{improves, ModelError, Operator, PartialState, Plan, Problem, State};
use crate::scalar::{max, tail_weights, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Brute,
    Dp,
    Bnb,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Dp, Algorithm::Bnb, Algorithm::Brute];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Brute => "brute",
            Algorithm::Dp => "dp",
            Algorithm::Bnb => "bnb",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "brute" => Ok(Algorithm::Brute),
            "dp" => Ok(Algorithm::Dp),
            "bnb" => Ok(Algorithm::Bnb),
            other => Err(format!("unknown algorithm `{other}` (expected dp, bnb or brute)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("exhaustive enumeration needs {needed} plans, limit is {limit}")]
    TooManyPlans { needed: u64, limit: u64 },
    #[error("state table needs more than {limit} cells (reached {cells})")]
    TooManyStates { cells: u64, limit: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl SearchError {
    pub fn is_limit(&self) -> bool {
        matches!(self, SearchError::TooManyPlans { .. } | SearchError::TooManyStates { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    /// Optimal objective value; `None` marks an unreachable `MinCost` goal.
    pub value: Option<T>,
    /// A plan achieving `value` (empty when infeasible).
    pub plan: Plan,
    pub nodes_expanded: u64,
    pub algorithm: Algorithm,
    /// `MinCost` without a goal: the empty plan is returned untouched.
    pub degenerate: bool,
}

impl<T> SolveResult<T> {
    pub fn is_infeasible(&self) -> bool {
        self.value.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint<T> {
    pub cost: T,
    pub utility: T,
    pub plan: Plan,
}

/// Non-dominated `(cost, utility)` outcomes, ascending in cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront<T> {
    pub points: Vec<ParetoPoint<T>>,
}

impl<T: Scalar> ParetoFront<T> {
    pub fn pairs(&self) -> Vec<(T, T)> {
        self.points.iter().map(|p| (p.cost.clone(), p.utility.clone())).collect()
    }
}

/// Entry points for every exact solver, parameterized by size guards.
#[derive(Debug, Clone, Copy, Default)]
pub struct Solver {
    limits: Limits,
    parallel: bool,
}

impl Solver {
    pub fn new(limits: Limits) -> Self {
        Solver { limits, parallel: false }
    }

    /// Splits the exhaustive enumeration over root branches. Results are
    /// identical to the serial run.
    pub fn parallel(mut self, yes: bool) -> Self {
        self.parallel = yes;
        self
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn solve<T: Scalar>(&self, algorithm: Algorithm, pr: &Problem<T>) -> Result<SolveResult<T>, SearchError> {
        self.solve_from(algorithm, pr, pr.initial_state(), pr.horizon())
    }

    /// Solves the problem as if it started in `start` with `horizon` steps
    /// left. Values are re-based: the first step from `start` has weight 1.
    pub fn solve_from<T: Scalar>(
        &self,
        algorithm: Algorithm,
        pr: &Problem<T>,
        start: &State,
        horizon: usize,
    ) -> Result<SolveResult<T>, SearchError> {
        pr.check_state(start)?;
        let ctx = Ctx::new(pr, horizon);
        if ctx.minimize && ctx.goal.is_none() {
            return Ok(SolveResult {
                value: Some(T::zero()),
                plan: Plan::empty(),
                nodes_expanded: 0,
                algorithm,
                degenerate: true,
            });
        }
        match algorithm {
            Algorithm::Brute => self.brute_from(&ctx, start),
            Algorithm::Dp => self.dp_from(&ctx, start),
            Algorithm::Bnb => Ok(bnb_from(&ctx, start)),
        }
    }

    pub fn brute<T: Scalar>(&self, pr: &Problem<T>) -> Result<SolveResult<T>, SearchError> {
        self.solve(Algorithm::Brute, pr)
    }

    pub fn dp<T: Scalar>(&self, pr: &Problem<T>) -> Result<SolveResult<T>, SearchError> {
        self.solve(Algorithm::Dp, pr)
    }

    pub fn bnb<T: Scalar>(&self, pr: &Problem<T>) -> Result<SolveResult<T>, SearchError> {
        self.solve(Algorithm::Bnb, pr)
    }

    fn brute_from<T: Scalar>(&self, ctx: &Ctx<'_, T>, start: &State) -> Result<SolveResult<T>, SearchError> {
        let needed = plan_tree_size(ctx.pr.operators().len() as u64, ctx.horizon);
        if needed > self.limits.brute_plans {
            return Err(SearchError::TooManyPlans { needed, limit: self.limits.brute_plans });
        }
        let mut best = Best::new(ctx.minimize);
        let mut nodes = 1u64;
        let root = Node { state: start.clone(), value: T::zero(), weight: T::one() };
        brute_offer(ctx, &root, &[], &mut best);
        if ctx.horizon > 0 {
            let children: Vec<(usize, Node<T>)> = ctx
                .pr
                .operators()
                .iter()
                .enumerate()
                .filter(|(_, op)| start.agrees_with(op.pre()))
                .map(|(i, _)| (i, ctx.child(&root, i)))
                .collect();
            let explore = |(i, child): &(usize, Node<T>)| {
                let mut local = Best::new(ctx.minimize);
                let mut local_nodes = 0u64;
                let mut path = vec![*i];
                brute_dfs(ctx, child, 1, &mut path, &mut local, &mut local_nodes);
                (local, local_nodes)
            };
            let branches: Vec<(Best<T>, u64)> = if self.parallel {
                children.par_iter().map(explore).collect()
            } else {
                children.iter().map(explore).collect()
            };
            for (local, local_nodes) in branches {
                nodes += local_nodes;
                best.merge(local);
            }
        }
        Ok(best.into_result(ctx.pr, Algorithm::Brute, nodes))
    }

    fn dp_from<T: Scalar>(&self, ctx: &Ctx<'_, T>, start: &State) -> Result<SolveResult<T>, SearchError> {
        let table = ValueTable::build(ctx, start, self.limits.states)?;
        let cell = table.cell(0, ctx.horizon).expect("root cell");
        let plan = table.extract(0, ctx.horizon);
        Ok(SolveResult {
            value: cell.value.clone(),
            plan,
            nodes_expanded: table.cells,
            algorithm: Algorithm::Dp,
            degenerate: false,
        })
    }

    /// Full value table `V(s, d)` for every state reachable from the initial
    /// state and every `d` it can still use.
    pub fn dp_table<'a, T: Scalar>(&self, pr: &'a Problem<T>) -> Result<ValueTable<'a, T>, SearchError> {
        let ctx = Ctx::new(pr, pr.horizon());
        ValueTable::build(&ctx, pr.initial_state(), self.limits.states)
    }

    /// Exact Pareto front over `(total cost, total utility)` of all valid
    /// plans, with one witness plan per point.
    #[allow(clippy::needless_range_loop)]
    pub fn pareto<T: Scalar>(&self, pr: &Problem<T>) -> Result<ParetoFront<T>, SearchError> {
        let horizon = pr.horizon();
        let space = StateSpace::explore(pr, pr.initial_state(), horizon, self.limits.states)?;
        let ops = pr.operators();
        // layers[d][s] = non-dominated points for state s with d steps left
        let mut layers: Vec<Vec<Vec<FrontEntry<T>>>> = Vec::with_capacity(horizon + 1);
        for d in 0..=horizon {
            let mut layer = vec![Vec::new(); space.len()];
            for s in 0..space.len() {
                if space.depth[s] + d > horizon {
                    continue;
                }
                let mut cands = vec![FrontEntry { cost: T::zero(), utility: T::zero(), len: 0, op: None, next: 0 }];
                if d > 0 {
                    for &(op, next) in &space.succ[s] {
                        let o = &ops[op as usize];
                        for (idx, sub) in layers[d - 1][next as usize].iter().enumerate() {
                            cands.push(FrontEntry {
                                cost: o.cost().clone() + sub.cost.clone(),
                                utility: o.utility().clone() + sub.utility.clone(),
                                len: sub.len + 1,
                                op: Some((op, next)),
                                next: idx as u32,
                            });
                        }
                    }
                }
                layer[s] = nondominated(cands);
            }
            layers.push(layer);
        }
        let points = layers[horizon][0]
            .iter()
            .map(|e| {
                let mut steps = Vec::with_capacity(e.len as usize);
                let mut cur = e;
                let mut d = horizon;
                while let Some((op, next)) = cur.op {
                    steps.push(ops[op as usize].name().to_string());
                    d -= 1;
                    cur = &layers[d][next as usize][cur.next as usize];
                }
                ParetoPoint { cost: e.cost.clone(), utility: e.utility.clone(), plan: Plan::new(steps) }
            })
            .collect();
        Ok(ParetoFront { points })
    }
}

pub fn solve_brute<T: Scalar>(pr: &Problem<T>) -> Result<SolveResult<T>, SearchError> {
    Solver::default().brute(pr)
}

pub fn solve_dp<T: Scalar>(pr: &Problem<T>) -> Result<SolveResult<T>, SearchError> {
    Solver::default().dp(pr)
}

pub fn solve_bnb<T: Scalar>(pr: &Problem<T>) -> Result<SolveResult<T>, SearchError> {
    Solver::default().bnb(pr)
}

pub fn pareto_front<T: Scalar>(pr: &Problem<T>) -> Result<ParetoFront<T>, SearchError> {
    Solver::default().pareto(pr)
}

/// `sum_{d=0..horizon} ops^d`, saturating.
pub fn plan_tree_size(ops: u64, horizon: usize) -> u64 {
    let mut total = 0u64;
    let mut layer = 1u64;
    for _ in 0..=horizon {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(ops);
    }
    total
}

struct Ctx<'a, T> {
    pr: &'a Problem<T>,
    horizon: usize,
    gamma: T,
    gamma_is_one: bool,
    minimize: bool,
    goal: Option<&'a PartialState>,
}

impl<'a, T: Scalar> Ctx<'a, T> {
    fn new(pr: &'a Problem<T>, horizon: usize) -> Self {
        let gamma = pr.objective().gamma();
        Ctx {
            pr,
            horizon,
            gamma_is_one: gamma.is_one(),
            gamma,
            minimize: pr.objective().is_minimizing(),
            goal: pr.objective().goal(),
        }
    }

    fn reached(&self, s: &State) -> bool {
        self.goal.is_none_or(|g| s.agrees_with(g))
    }

    fn scaled(&self, x: T) -> T {
        if self.gamma_is_one {
            x
        } else {
            self.gamma.clone() * x
        }
    }

    fn child(&self, node: &Node<T>, op: usize) -> Node<T> {
        let o = &self.pr.operators()[op];
        let state = node.state.with_effect(o.eff());
        if self.minimize {
            Node { state, value: node.value.clone() + o.cost().clone(), weight: T::one() }
        } else {
            Node {
                state,
                value: node.value.clone() + o.net() * node.weight.clone(),
                weight: self.scaled(node.weight.clone()),
            }
        }
    }
}

struct Node<T> {
    state: State,
    /// Accumulated objective value of the path to this node.
    value: T,
    /// `gamma^depth`
    weight: T,
}

struct Best<T> {
    minimize: bool,
    value: Option<T>,
    path: Vec<usize>,
}

impl<T: Scalar> Best<T> {
    fn new(minimize: bool) -> Self {
        Best { minimize, value: None, path: Vec::new() }
    }

    fn offer(&mut self, value: &T, path: &[usize]) {
        let better = match &self.value {
            None => true,
            Some(v) => improves(self.minimize, (value, path.len()), (v, self.path.len())),
        };
        if better {
            self.value = Some(value.clone());
            self.path.clear();
            self.path.extend_from_slice(path);
        }
    }

    fn merge(&mut self, other: Best<T>) {
        if let Some(v) = &other.value {
            self.offer(v, &other.path);
        }
    }

    fn into_result(self, pr: &Problem<T>, algorithm: Algorithm, nodes: u64) -> SolveResult<T> {
        let plan = Plan::new(self.path.iter().map(|&i| pr.operators()[i].name().to_string()));
        SolveResult { value: self.value, plan, nodes_expanded: nodes, algorithm, degenerate: false }
    }
}

fn brute_offer<T: Scalar>(ctx: &Ctx<'_, T>, node: &Node<T>, path: &[usize], best: &mut Best<T>) {
    if ctx.reached(&node.state) {
        best.offer(&node.value, path);
    }
}

fn brute_dfs<T: Scalar>(
    ctx: &Ctx<'_, T>,
    node: &Node<T>,
    depth: usize,
    path: &mut Vec<usize>,
    best: &mut Best<T>,
    nodes: &mut u64,
) {
    *nodes += 1;
    brute_offer(ctx, node, path, best);
    if depth == ctx.horizon {
        return;
    }
    for (i, op) in ctx.pr.operators().iter().enumerate() {
        if node.state.agrees_with(op.pre()) {
            let child = ctx.child(node, i);
            path.push(i);
            brute_dfs(ctx, &child, depth + 1, path, best, nodes);
            path.pop();
        }
    }
}

struct Bnb<'c, 'a, T> {
    ctx: &'c Ctx<'a, T>,
    /// `max(0, max_o (r(o) - c(o)))`, ignoring preconditions.
    max_gain: T,
    tail: Vec<T>,
    memo: HashMap<(State, usize), T>,
    best: Best<T>,
    nodes: u64,
}

fn bnb_from<T: Scalar>(ctx: &Ctx<'_, T>, start: &State) -> SolveResult<T> {
    let max_gain = ctx.pr.operators().iter().fold(T::zero(), |acc, o| max(acc, o.net()));
    let mut bnb = Bnb {
        ctx,
        max_gain,
        tail: tail_weights(&ctx.gamma, ctx.horizon),
        memo: HashMap::new(),
        best: Best::new(ctx.minimize),
        nodes: 0,
    };
    let root = Node { state: start.clone(), value: T::zero(), weight: T::one() };
    let mut path = Vec::new();
    bnb.visit(&root, 0, &mut path);
    let nodes = bnb.nodes;
    bnb.best.into_result(ctx.pr, Algorithm::Bnb, nodes)
}

impl<T: Scalar> Bnb<'_, '_, T> {
    fn visit(&mut self, node: &Node<T>, depth: usize, path: &mut Vec<usize>) {
        self.nodes += 1;
        let minimize = self.ctx.minimize;
        // An earlier node with the same state and depth and an at least as
        // good prefix dominates this one, including on ties: it has the same
        // length and came first in lexicographic order.
        match self.memo.entry((node.state.clone(), depth)) {
            Entry::Occupied(mut e) => {
                let dominated = if minimize { node.value >= *e.get() } else { node.value <= *e.get() };
                if dominated {
                    return;
                }
                e.insert(node.value.clone());
            }
            Entry::Vacant(e) => {
                e.insert(node.value.clone());
            }
        }
        if minimize {
            if self.ctx.reached(&node.state) {
                // extensions only add cost and length
                self.best.offer(&node.value, path);
                return;
            }
            if depth == self.ctx.horizon {
                return;
            }
            if let Some(inc) = &self.best.value {
                if node.value > *inc || (node.value == *inc && self.best.path.len() <= depth + 1) {
                    return;
                }
            }
        } else {
            self.best.offer(&node.value, path);
            if depth == self.ctx.horizon {
                return;
            }
            let bound = node.value.clone() + self.max_gain.clone() * self.tail[depth].clone();
            let inc = self.best.value.as_ref().expect("incumbent");
            if bound < *inc || (bound == *inc && self.best.path.len() <= depth + 1) {
                return;
            }
        }
        for (i, op) in self.ctx.pr.operators().iter().enumerate() {
            if node.state.agrees_with(op.pre()) {
                let child = self.ctx.child(node, i);
                path.push(i);
                self.visit(&child, depth + 1, path);
                path.pop();
            }
        }
    }
}

/// States reachable from a start state within the horizon, with the
/// applicable transitions of each state that is not on the last layer.
struct StateSpace {
    states: Vec<State>,
    index: HashMap<State, u32>,
    /// Shortest distance from the start.
    depth: Vec<usize>,
    /// `(operator, successor)` in operator-name order.
    succ: Vec<Vec<(u32, u32)>>,
}

impl StateSpace {
    fn explore<T: Scalar>(pr: &Problem<T>, start: &State, horizon: usize, limit: u64) -> Result<Self, SearchError> {
        let per_state = horizon as u64 + 1;
        let mut space = StateSpace {
            states: vec![start.clone()],
            index: HashMap::from([(start.clone(), 0)]),
            depth: vec![0],
            succ: vec![Vec::new()],
        };
        if per_state > limit {
            return Err(SearchError::TooManyStates { cells: per_state, limit });
        }
        let mut queue = VecDeque::from([0u32]);
        while let Some(s) = queue.pop_front() {
            let d = space.depth[s as usize];
            if d == horizon {
                continue;
            }
            let mut succ = Vec::new();
            for (i, op) in pr.operators().iter().enumerate() {
                let state = &space.states[s as usize];
                if !state.agrees_with(op.pre()) {
                    continue;
                }
                let next = state.with_effect(op.eff());
                let id = match space.index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = space.states.len() as u32;
                        let cells = (id as u64 + 1).saturating_mul(per_state);
                        if cells > limit {
                            return Err(SearchError::TooManyStates { cells, limit });
                        }
                        space.index.insert(next.clone(), id);
                        space.states.push(next);
                        space.depth.push(d + 1);
                        space.succ.push(Vec::new());
                        queue.push_back(id);
                        id
                    }
                };
                succ.push((i as u32, id));
            }
            space.succ[s as usize] = succ;
        }
        Ok(space)
    }

    fn len(&self) -> usize {
        self.states.len()
    }
}

#[derive(Debug, Clone)]
struct Cell<T> {
    /// `None`: goal unreachable (`MinCost` only).
    value: Option<T>,
    len: u32,
    choice: Option<u32>,
}

/// Backward-induction table over `(state, remaining steps)`.
///
/// For the maximizing objectives `V(s, 0) = 0` and
/// `V(s, d) = max(0, max_o (r(o) - c(o)) + gamma * V(o(s), d - 1))`.
/// For `MinCost`, `C(s, d) = 0` when the goal holds in `s`, otherwise the
/// cheapest `c(o) + C(o(s), d - 1)`, infeasible at `d = 0`.
pub struct ValueTable<'a, T> {
    pr: &'a Problem<T>,
    space: StateSpace,
    layers: Vec<Vec<Option<Cell<T>>>>,
    horizon: usize,
    cells: u64,
}

impl<'a, T: Scalar> ValueTable<'a, T> {
    #[allow(clippy::needless_range_loop)]
    fn build(ctx: &Ctx<'a, T>, start: &State, limit: u64) -> Result<Self, SearchError> {
        let space = StateSpace::explore(ctx.pr, start, ctx.horizon, limit)?;
        let ops = ctx.pr.operators();
        let nets: Vec<T> = ops.iter().map(Operator::net).collect();
        let mut layers: Vec<Vec<Option<Cell<T>>>> = Vec::with_capacity(ctx.horizon + 1);
        let mut cells = 0u64;
        for d in 0..=ctx.horizon {
            let mut layer: Vec<Option<Cell<T>>> = vec![None; space.len()];
            for s in 0..space.len() {
                if space.depth[s] + d > ctx.horizon {
                    continue;
                }
                cells += 1;
                let cell = if ctx.minimize {
                    if ctx.reached(&space.states[s]) {
                        Cell { value: Some(T::zero()), len: 0, choice: None }
                    } else {
                        let mut best = Cell { value: None, len: 0, choice: None };
                        if d > 0 {
                            for &(op, next) in &space.succ[s] {
                                let sub = layers[d - 1][next as usize].as_ref().expect("successor cell");
                                let Some(sub_value) = &sub.value else { continue };
                                let q = ops[op as usize].cost().clone() + sub_value.clone();
                                let len = sub.len as usize + 1;
                                let better = match &best.value {
                                    None => true,
                                    Some(v) => improves(true, (&q, len), (v, best.len as usize)),
                                };
                                if better {
                                    best = Cell { value: Some(q), len: len as u32, choice: Some(op) };
                                }
                            }
                        }
                        best
                    }
                } else {
                    let mut best_value = T::zero();
                    let mut best = Cell { value: None, len: 0, choice: None };
                    if d > 0 {
                        for &(op, next) in &space.succ[s] {
                            let sub = layers[d - 1][next as usize].as_ref().expect("successor cell");
                            let sub_value = sub.value.clone().expect("maximizing cells are finite");
                            let q = nets[op as usize].clone() + ctx.scaled(sub_value);
                            let len = sub.len as usize + 1;
                            if improves(false, (&q, len), (&best_value, best.len as usize)) {
                                best_value = q;
                                best.len = len as u32;
                                best.choice = Some(op);
                            }
                        }
                    }
                    best.value = Some(best_value);
                    best
                };
                layer[s] = Some(cell);
            }
            layers.push(layer);
        }
        Ok(ValueTable { pr: ctx.pr, space, layers, horizon: ctx.horizon, cells })
    }

    fn cell(&self, s: u32, remaining: usize) -> Option<&Cell<T>> {
        self.layers.get(remaining)?.get(s as usize)?.as_ref()
    }

    fn extract(&self, s: u32, remaining: usize) -> Plan {
        let mut steps = Vec::new();
        let mut s = s;
        let mut d = remaining;
        while let Some(op) = self.cell(s, d).and_then(|c| c.choice) {
            let (_, next) = *self.space.succ[s as usize].iter().find(|(o, _)| *o == op).expect("transition");
            steps.push(self.pr.operators()[op as usize].name().to_string());
            s = next;
            d -= 1;
        }
        Plan::new(steps)
    }

    /// Optimal re-based value from `state` with `remaining` steps left.
    /// `None` if the pair is outside the table or the goal is unreachable.
    pub fn value(&self, state: &State, remaining: usize) -> Option<&T> {
        let &id = self.space.index.get(state)?;
        self.cell(id, remaining)?.value.as_ref()
    }

    /// Tie-broken optimal plan from `state` with `remaining` steps left.
    pub fn plan_from(&self, state: &State, remaining: usize) -> Option<Plan> {
        let &id = self.space.index.get(state)?;
        self.cell(id, remaining)?;
        Some(self.extract(id, remaining))
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Reachable states, in discovery order.
    pub fn states(&self) -> &[State] {
        &self.space.states
    }

    /// Shortest distance of `state` from the start, if reachable.
    pub fn depth_of(&self, state: &State) -> Option<usize> {
        self.space.index.get(state).map(|&id| self.space.depth[id as usize])
    }
}

#[derive(Debug, Clone)]
struct FrontEntry<T> {
    cost: T,
    utility: T,
    len: u32,
    /// `(operator, successor state)` of the first step of the witness.
    op: Option<(u32, u32)>,
    /// Index of the witness suffix in the successor's front.
    next: u32,
}

/// Keeps the non-dominated entries, ascending in cost. Among equal
/// `(cost, utility)` pairs the shortest, then earliest, witness survives.
fn nondominated<T: Scalar>(mut cands: Vec<FrontEntry<T>>) -> Vec<FrontEntry<T>> {
    cands.sort_by(|a, b| {
        a.cost
            .partial_cmp(&b.cost)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| b.utility.partial_cmp(&a.utility).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| a.len.cmp(&b.len))
    });
    let mut out: Vec<FrontEntry<T>> = Vec::new();
    for c in cands {
        if out.last().is_none_or(|last| c.utility > last.utility) {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, ratio, ProblemBuilder, Rational};

    fn two_op() -> ProblemBuilder {
        ProblemBuilder::new("two_op")
            .variable("x", &["0", "1"])
            .operator("a", &[("x", "0")], &[("x", "1")], int(1), int(3))
            .operator("b", &[("x", "1")], &[("x", "0")], int(1), int(1))
            .init(&[("x", "0")])
            .horizon(3)
    }

    #[test]
    fn tree_size() {
        assert_eq!(plan_tree_size(2, 3), 15);
        assert_eq!(plan_tree_size(0, 5), 1);
        assert_eq!(plan_tree_size(u64::MAX, 3), u64::MAX);
    }

    #[test]
    fn brute_guard_refuses() {
        let pr = two_op().horizon(30).build().unwrap();
        let err = Solver::default().brute(&pr).unwrap_err();
        assert!(matches!(err, SearchError::TooManyPlans { .. }));
        assert!(err.is_limit());
    }

    #[test]
    fn dp_guard_refuses() {
        let pr = two_op().build().unwrap();
        let solver = Solver::new(Limits { states: 3, ..Limits::default() });
        assert!(matches!(solver.dp(&pr), Err(SearchError::TooManyStates { .. })));
    }

    #[test]
    fn root_pruned_when_nothing_pays() {
        let pr = ProblemBuilder::new("flat")
            .variable("x", &["0", "1"])
            .operator("a", &[], &[("x", "1")], int(2), int(1))
            .operator("b", &[], &[("x", "0")], int(1), int(1))
            .init(&[("x", "0")])
            .horizon(4)
            .build()
            .unwrap();
        let res = solve_bnb(&pr).unwrap();
        assert_eq!(res.value, Some(int(0)));
        assert!(res.plan.is_empty());
        assert_eq!(res.nodes_expanded, 1);
        assert_eq!(solve_brute(&pr).unwrap().value, Some(int(0)));
    }

    #[test]
    fn mincost_without_goal_is_degenerate() {
        let pr = two_op().min_cost(None).build().unwrap();
        for algo in Algorithm::ALL {
            let res = Solver::default().solve(algo, &pr).unwrap();
            assert!(res.degenerate);
            assert_eq!(res.value, Some(int(0)));
            assert!(res.plan.is_empty());
        }
    }

    #[test]
    fn mincost_unreachable_goal_is_infeasible() {
        let pr = ProblemBuilder::new("stuck")
            .variable("x", &["0", "1"])
            .operator("a", &[("x", "1")], &[("x", "0")], int(1), int(0))
            .init(&[("x", "0")])
            .horizon(2)
            .min_cost(Some(&[("x", "1")]))
            .build()
            .unwrap();
        for algo in Algorithm::ALL {
            let res = Solver::default().solve(algo, &pr).unwrap();
            assert!(res.is_infeasible(), "{algo}");
            assert!(res.plan.is_empty());
        }
    }

    #[test]
    fn parallel_brute_matches_serial() {
        let pr = two_op().discounted(ratio(1, 2)).build().unwrap();
        let serial = Solver::default().brute(&pr).unwrap();
        let parallel = Solver::default().parallel(true).brute(&pr).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn ties_prefer_shorter_then_lexicographic() {
        // `z` alone earns 2; `a` then `b` also earns 2 in two steps.
        let pr = ProblemBuilder::new("ties")
            .variable("x", &["0", "1", "2"])
            .operator("a", &[("x", "0")], &[("x", "1")], int(0), int(1))
            .operator("b", &[("x", "1")], &[("x", "2")], int(0), int(1))
            .operator("z", &[("x", "0")], &[("x", "2")], int(0), int(2))
            .operator("y", &[("x", "0")], &[("x", "2")], int(0), int(2))
            .init(&[("x", "0")])
            .horizon(2)
            .build()
            .unwrap();
        for algo in Algorithm::ALL {
            let res = Solver::default().solve(algo, &pr).unwrap();
            assert_eq!(res.value, Some(int(2)));
            assert_eq!(res.plan, Plan::new(["y"]), "{algo}");
        }
    }

    #[test]
    fn zero_horizon_from_start() {
        let pr = two_op().build().unwrap();
        for algo in Algorithm::ALL {
            let res = Solver::default().solve_from(algo, &pr, pr.initial_state(), 0).unwrap();
            assert_eq!(res.value, Some(int(0)));
            assert!(res.plan.is_empty());
        }
    }

    #[test]
    fn pareto_of_empty_operator_set() {
        let pr = ProblemBuilder::new("none").variable("x", &["a"]).init(&[("x", "a")]).build().unwrap();
        let front = pareto_front(&pr).unwrap();
        assert_eq!(front.pairs(), vec![(int(0), int(0))]);
        assert!(front.points[0].plan.is_empty());
    }

    #[test]
    fn nondominated_filter() {
        let e =
            |c: i64, u: i64, len: u32| FrontEntry::<Rational> { cost: int(c), utility: int(u), len, op: None, next: 0 };
        let out = nondominated(vec![e(1, 3, 2), e(0, 0, 0), e(1, 3, 1), e(2, 2, 1), e(2, 4, 3), e(1, 1, 1)]);
        let got: Vec<_> = out.iter().map(|x| (x.cost.clone(), x.utility.clone(), x.len)).collect();
        assert_eq!(got, vec![(int(0), int(0), 0), (int(1), int(3), 1), (int(2), int(4), 3)]);
    }
}
