//! Exact bounded-horizon planning with cost and utility.
//!
//! A problem is a set of finite-domain variables, operators with
//! precondition, effect, cost and utility, an initial state and a horizon.
//! Every operator sequence of length at most the horizon is a solution; the
//! objective decides which is best (minimum cost to a goal, maximum net
//! benefit, or maximum discounted net benefit).
//!
//! The numeric routines are generic over [`Scalar`]. The aliases at the
//! crate root fix the scalar to exact [`Rational`] numbers, which is what the
//! file formats, the session service and the CLI use.

pub mod dialog;
pub mod exec;
pub mod generate;
pub mod limits;
pub mod model;
pub mod scalar;
pub mod search;
pub mod textio;

pub use limits::Limits;
pub use model::{ModelError, ObjectiveKind, PartialState, Plan, State, ValueId, VariableDef};
pub use scalar::Scalar;
pub use search::{Algorithm, SearchError};

/// Arbitrary-precision rational, the default scalar.
pub type Rational = num_rational::BigRational;

pub type Problem = model::Problem<Rational>;
pub type Operator = model::Operator<Rational>;
pub type Objective = model::Objective<Rational>;
pub type PlanEval = model::PlanEval<Rational>;
pub type ProblemBuilder = model::ProblemBuilder<Rational>;
pub type SolveResult = search::SolveResult<Rational>;
pub type ParetoFront = search::ParetoFront<Rational>;

pub type DialogSpec = dialog::DialogSpec<Rational>;
pub type Episode = exec::Episode<Rational>;
pub type Turn = exec::Turn<Rational>;

pub type ProblemF64 = model::Problem<f64>;
pub type SolveResultF64 = search::SolveResult<f64>;

/// `n/d` as an exact rational.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

/// `n` as an exact rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
