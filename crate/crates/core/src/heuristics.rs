//! Heuristic first-stage schedules, each scored by [`adversarial_value`].

use std::fmt;
use std::time::{Duration, Instant};

use rrs_lp::{solve_lp, LinearProgram, LpStatus, LpTolerances, Relation, Sense, SolveConfig};

use crate::error::{check_len, CoreError};
use crate::instance::{spt_schedule, Instance, Schedule};
use crate::models::{solve_recoverable, ModelKind, RecoverableConfig};
use crate::subproblems::adversarial_value;
use crate::uncertainty::{status_name, PolyhedralUncertainty};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Sorting,
    MaxMin,
    MinMax,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Sorting, Method::MaxMin, Method::MinMax];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sorting => "sorting",
            Method::MaxMin => "maxmin",
            Method::MinMax => "minmax",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| format!("unknown heuristic {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeuristicResult {
    pub schedule: Schedule,
    pub value: f64,
    pub method: Method,
    pub wall_time: Duration,
}

/// Sort key for [`sorting_heuristic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SortingKey {
    /// `p̂_i + p̄_i`, the largest time in the budgeted box.
    #[default]
    NominalPlusDeviation,
    /// Largest `p_i` over a general polyhedron (an extension for sets without box data).
    CoordinateMax,
}

fn evaluate(schedule: Schedule, u: &PolyhedralUncertainty, delta: usize, method: Method, start: Instant)
    -> Result<HeuristicResult, CoreError>
{
    let value = adversarial_value(&schedule, u, delta)?.value;
    Ok(HeuristicResult { schedule, value, method, wall_time: start.elapsed() })
}

/// Orders jobs by non-decreasing key, ties by index.
pub fn sorting_heuristic(inst: &Instance, u: &PolyhedralUncertainty, delta: usize, key: SortingKey)
    -> Result<HeuristicResult, CoreError>
{
    let start = Instant::now();
    check_len(inst.n(), u.n())?;
    let keys: Vec<f64> = match key {
        SortingKey::NominalPlusDeviation => inst.nominal().iter().zip(inst.deviation()).map(|(a, b)| a + b).collect(),
        SortingKey::CoordinateMax => u.coordinate_max()?,
    };
    evaluate(spt_schedule(&keys), u, delta, Method::Sorting, start)
}

/// Solves `max_{p∈U} min_x cost(x, p)` as one LP by dualizing the inner
/// assignment problem (`u_l + v_i ≤ (n − l) p_i`). Returns the value and a maximizing `p`.
pub fn maxmin_scenario(u: &PolyhedralUncertainty) -> Result<(f64, Vec<f64>), CoreError> {
    let n = u.n();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let p = u.add_to_lp(&mut lp, "p", &vec![0.0; n]);
    let pos: Vec<usize> = (0..n).map(|l| lp.add_var(format!("u[{l}]"), f64::NEG_INFINITY, f64::INFINITY, 1.0)).collect();
    let job: Vec<usize> = (0..n).map(|i| lp.add_var(format!("v[{i}]"), f64::NEG_INFINITY, f64::INFINITY, 1.0)).collect();
    for i in 0..n {
        for l in 0..n {
            lp.add_constraint(vec![(pos[l], 1.0), (job[i], 1.0), (p[i], -((n - l) as f64))], Relation::Le, 0.0);
        }
    }
    let sol = solve_lp(&lp, &LpTolerances::default())?;
    if sol.status != LpStatus::Optimal {
        return Err(CoreError::LpStatus { status: status_name(sol.status), context: "max-min LP".into() });
    }
    Ok((sol.objective, p.iter().map(|&c| sol.x[c].max(0.0)).collect()))
}

/// SPT order under the max-min scenario.
pub fn maxmin_heuristic(inst: &Instance, u: &PolyhedralUncertainty, delta: usize) -> Result<HeuristicResult, CoreError> {
    let start = Instant::now();
    check_len(inst.n(), u.n())?;
    let (_, p) = maxmin_scenario(u)?;
    evaluate(spt_schedule(&p), u, delta, Method::MaxMin, start)
}

/// Exact min-max schedule without recourse (assignment model at `Δ = 0`),
/// scored with recourse budget `delta`.
pub fn minmax_solve(inst: &Instance, u: &PolyhedralUncertainty, delta: usize, milp: &SolveConfig)
    -> Result<HeuristicResult, CoreError>
{
    let start = Instant::now();
    let cfg = RecoverableConfig { milp: milp.clone(), warm_start: None };
    let sol = solve_recoverable(ModelKind::Assignment, inst, u, 0, &cfg)?;
    let schedule = sol.first_stage.ok_or_else(|| CoreError::LpStatus {
        status: "without incumbent",
        context: "min-max model hit its time limit".into(),
    })?;
    evaluate(schedule, u, delta, Method::MinMax, start)
}

/// Runs one heuristic by name.
pub fn run_heuristic(method: Method, inst: &Instance, u: &PolyhedralUncertainty, delta: usize, key: SortingKey, milp: &SolveConfig)
    -> Result<HeuristicResult, CoreError>
{
    match method {
        Method::Sorting => sorting_heuristic(inst, u, delta, key),
        Method::MaxMin => maxmin_heuristic(inst, u, delta),
        Method::MinMax => minmax_solve(inst, u, delta, milp),
    }
}
