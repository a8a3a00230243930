//! Recoverable robust single-machine scheduling.
//!
//! A first-stage job order is fixed before processing times are known. Once a
//! scenario `p` from a polyhedral set `U` is revealed, up to `Δ` disjoint pairs
//! of jobs may swap positions. The goal is the order with the smallest
//! worst-case total flow time after the best recovery.
//!
//! * [`instance`]: schedules, costs, swap recoveries
//! * [`uncertainty`]: polyhedral and budgeted scenario sets
//! * [`subproblems`]: incremental and adversarial LPs for a fixed schedule
//! * [`models`]: compact MILPs for the full problem
//! * [`heuristics`]: sorting, max-min and min-max schedules
//! * [`oracle`]: brute-force reference solvers

// Index loops mirror the model algebra over jobs and positions.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod heuristics;
pub mod instance;
pub mod models;
pub mod oracle;
pub mod subproblems;
pub mod uncertainty;

pub use error::CoreError;
pub use instance::{apply_swaps, schedule_cost, spt_schedule, swap_distance, Instance, RecoveryMatching, Schedule, SwapDistance};
pub use models::{
    build_model, complete_warm_start, dump_model, lp_relaxation_value, matching_to_assignment_map, solve_recoverable,
    ModelKind, RecoverableConfig, RecoverableSolution,
};
pub use subproblems::{
    adversarial_value, incremental_assignment, incremental_matching, swap_gain, AdversarialResult, IncrementalResult,
};
pub use uncertainty::{budgeted_to_polyhedral, BudgetedParams, Compactness, PolyhedralUncertainty, UncertaintySpec};
