//! Dense linear and 0/1 mixed-integer programming.
//!
//! [`solve_lp`] is a two-phase primal simplex on a dense tableau, sized for
//! desk-scale models of a few thousand columns. [`solve_milp`] runs best-bound
//! branch-and-bound on top of it.

// Index loops mirror the model algebra over jobs and positions.
#![allow(clippy::needless_range_loop)]

mod dump;
mod milp;
mod model;
mod simplex;

pub use dump::{parse_dump, write_dump};
pub use milp::{
    solve_milp, warm_start_check, IncumbentEvent, MilpError, MilpSolution, MilpStatus, MixedIntegerProgram,
    RejectReason, SolveConfig, WarmStartCheck,
};
pub use model::{Constraint, LinearProgram, Relation, Sense};
pub use simplex::{solve_lp, solve_lp_with_bounds, LpSolution, LpStatus, LpTolerances};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("variable {var} has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { var: usize, lower: f64, upper: f64 },
    #[error("non-finite data: {0}")]
    NonFinite(String),
    #[error("simplex exceeded its iteration budget after {iterations} pivots")]
    NumericalFailure { iterations: usize },
    #[error("malformed LP dump at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
