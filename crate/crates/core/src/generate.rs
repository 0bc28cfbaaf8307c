//! Seeded random instances in three structural classes.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Objective, ObjectiveKind, Operator, PartialState, State, ValueId, VariableDef};
use crate::{ratio, Problem, Rational};

/// Largest accepted value for each size parameter.
pub const MAX_VARS: usize = 32;
pub const MAX_DOMAIN: usize = 32;
pub const MAX_OPS: usize = 4096;
pub const MAX_HORIZON: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceClass {
    /// Every operator has the same cost; utilities vary.
    ConstantCost,
    /// Every operator has the same cost and the same utility.
    ConstantUtilityAndCost,
    /// Costs are constant; utilities are drawn per operator and not all equal.
    VaryingUtilityConstantCost,
}

impl InstanceClass {
    pub const ALL: [InstanceClass; 3] =
        [InstanceClass::ConstantCost, InstanceClass::ConstantUtilityAndCost, InstanceClass::VaryingUtilityConstantCost];
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceClass::ConstantCost => "constant_cost",
            InstanceClass::ConstantUtilityAndCost => "constant_utility_and_cost",
            InstanceClass::VaryingUtilityConstantCost => "varying_utility_constant_cost",
        })
    }
}

impl FromStr for InstanceClass {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        InstanceClass::ALL.into_iter().find(|c| c.to_string() == s).ok_or_else(|| GenError::UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("unknown instance class `{0}`")]
    UnknownClass(String),
    #[error("{what} must be between {min} and {max}, got {got}")]
    Size { what: &'static str, min: usize, max: usize, got: usize },
}

/// Generator parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenClass {
    pub class: InstanceClass,
    pub vars: usize,
    pub domain: usize,
    pub ops: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl GenClass {
    pub fn new(class: InstanceClass, seed: u64) -> Self {
        GenClass { class, vars: 3, domain: 3, ops: 5, horizon: 5, seed }
    }

    pub fn sizes(mut self, vars: usize, domain: usize, ops: usize, horizon: usize) -> Self {
        self.vars = vars;
        self.domain = domain;
        self.ops = ops;
        self.horizon = horizon;
        self
    }

    fn check(&self) -> Result<(), GenError> {
        let checks = [
            ("vars", self.vars, MAX_VARS),
            ("dom", self.domain, MAX_DOMAIN),
            ("ops", self.ops, MAX_OPS),
            ("k", self.horizon, MAX_HORIZON),
        ];
        for (what, got, max) in checks {
            if got == 0 || got > max {
                return Err(GenError::Size { what, min: 1, max, got });
            }
        }
        Ok(())
    }
}

/// Costs and utilities are halves in `[0, 5]`; constant costs are positive.
fn draw_amount(rng: &mut ChaCha8Rng, positive: bool) -> Rational {
    ratio(rng.gen_range(i64::from(positive)..=10), 2)
}

fn draw_bindings(rng: &mut ChaCha8Rng, vars: &[usize], domain: usize) -> PartialState {
    PartialState::from_bindings(vars.iter().map(|&v| (v, rng.gen_range(0..domain) as ValueId)))
        .expect("distinct variables")
}

/// Draws an instance. The objective is chosen by the caller; discounted
/// instances draw gamma from `{1/2, 3/4, 9/10, 1}` and min-cost instances
/// draw a one-variable goal.
pub fn gen_instance(g: &GenClass, objective: ObjectiveKind) -> Result<Problem, GenError> {
    g.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let variables: Vec<VariableDef> = (0..g.vars)
        .map(|i| VariableDef::new(format!("v{i}"), (0..g.domain).map(|d| d.to_string())).expect("valid names"))
        .collect();
    let s0 = State::new((0..g.vars).map(|_| rng.gen_range(0..g.domain) as ValueId).collect());

    let cost = draw_amount(&mut rng, true);
    let constant_utility = draw_amount(&mut rng, false);
    let mut utilities: Vec<Rational> = match g.class {
        InstanceClass::ConstantUtilityAndCost => vec![constant_utility; g.ops],
        InstanceClass::ConstantCost | InstanceClass::VaryingUtilityConstantCost => {
            (0..g.ops).map(|_| draw_amount(&mut rng, false)).collect()
        }
    };
    if g.class == InstanceClass::VaryingUtilityConstantCost && g.ops >= 2 {
        while utilities.iter().all(|u| *u == utilities[0]) {
            utilities = (0..g.ops).map(|_| draw_amount(&mut rng, false)).collect();
        }
    }

    let width = (g.ops - 1).to_string().len();
    let mut operators = Vec::with_capacity(g.ops);
    for (i, utility) in utilities.into_iter().enumerate() {
        let touched = rng.gen_range(1..=g.vars.min(2));
        let mut vars = sample(&mut rng, g.vars, touched).into_vec();
        vars.sort_unstable();
        let pre_vars: Vec<usize> = vars.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let pre = draw_bindings(&mut rng, &pre_vars, g.domain);
        let eff = draw_bindings(&mut rng, &vars, g.domain);
        let op = Operator::new(format!("o{i:0width$}"), pre, eff, cost.clone(), utility).expect("non-negative amounts");
        operators.push(op);
    }

    let objective = match objective {
        ObjectiveKind::NetBenefit => Objective::NetBenefit,
        ObjectiveKind::DiscountedNetBenefit => {
            let gammas = [ratio(1, 2), ratio(3, 4), ratio(9, 10), ratio(1, 1)];
            Objective::Discounted { gamma: gammas[rng.gen_range(0..gammas.len())].clone() }
        }
        ObjectiveKind::MinCost => {
            let var = rng.gen_range(0..g.vars);
            Objective::MinCost { goal: Some(draw_bindings(&mut rng, &[var], g.domain)) }
        }
    };
    let name = format!("{}_{}", g.class, g.seed);
    Ok(Problem::new(name, variables, operators, s0, g.horizon, objective).expect("generated instances are well-formed"))
}
