//! Compact MILP formulations of the recoverable robust problem.
//!
//! All three models share the first-stage assignment block `x[i][l]` (job `i`
//! in 0-based position `l`) and the dual block `q[m] ≥ 0` of the scenario
//! rows, with objective `Σ b_m q_m`. They differ in how the recovery is
//! encoded:
//!
//! * [`ModelKind::General`]: `K` candidate recoveries mixed by weights `mu[k]`
//! * [`ModelKind::Matching`]: swap variables `z[i][j]` on pairs `i < j`
//! * [`ModelKind::Assignment`]: a symmetric second-stage assignment `y[i][j]`

mod assignment;
mod general;
mod matching;
mod phi;

use std::fmt;
use std::str::FromStr;

use rrs_lp::{
    solve_lp, solve_lp_with_bounds, write_dump, IncumbentEvent, LinearProgram, LpStatus, LpTolerances, MilpStatus,
    MixedIntegerProgram, Relation, Sense, SolveConfig, WarmStartCheck,
};

use crate::error::{check_len, CoreError};
use crate::instance::{Instance, Schedule};
use crate::uncertainty::{status_name, PolyhedralUncertainty};

pub use phi::matching_to_assignment_map;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    General { k: usize },
    Matching,
    Assignment,
}

impl ModelKind {
    /// Candidate count at which the general model is exact.
    pub fn general_exact(n: usize) -> Self {
        ModelKind::General { k: n + 1 }
    }

    pub fn tag(&self) -> String {
        match self {
            ModelKind::General { k } => format!("general(K={k})"),
            ModelKind::Matching => "matching".into(),
            ModelKind::Assignment => "assignment".into(),
        }
    }
}

impl Default for ModelKind {
    fn default() -> Self {
        ModelKind::General { k: 2 }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    /// Accepts `general`, `general(K=3)`, `matching` and `assignment`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "matching" => Ok(ModelKind::Matching),
            "assignment" => Ok(ModelKind::Assignment),
            "general" => Ok(ModelKind::default()),
            _ => t
                .strip_prefix("general(k=")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|k| k.parse().ok())
                .filter(|&k| k >= 1)
                .map(|k| ModelKind::General { k })
                .ok_or_else(|| format!("unknown model {s:?}")),
        }
    }
}

/// Incremental model construction with name-addressable columns.
pub(crate) struct Builder {
    lp: LinearProgram,
    binary: Vec<usize>,
}

impl Builder {
    fn new() -> Self {
        Self { lp: LinearProgram::new(Sense::Minimize), binary: Vec::new() }
    }

    fn var(&mut self, name: String, upper: f64) -> usize {
        self.lp.add_var(name, 0.0, upper, 0.0)
    }

    fn bin(&mut self, name: String) -> usize {
        let c = self.lp.add_var(name, 0.0, 1.0, 0.0);
        self.binary.push(c);
        c
    }

    fn row(&mut self, coeffs: Vec<(usize, f64)>, rel: Relation, rhs: f64) {
        self.lp.add_constraint(coeffs, rel, rhs);
    }

    /// `x[i][l]` binary with row and column sums one.
    fn first_stage(&mut self, n: usize) -> Vec<Vec<usize>> {
        let x: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|l| self.bin(format!("x[{i}][{l}]"))).collect()).collect();
        for i in 0..n {
            self.row((0..n).map(|l| (x[i][l], 1.0)).collect(), Relation::Eq, 1.0);
        }
        for l in 0..n {
            self.row((0..n).map(|i| (x[i][l], 1.0)).collect(), Relation::Eq, 1.0);
        }
        x
    }

    /// `q[m] ≥ 0` with objective `b_m`.
    fn duals(&mut self, u: &PolyhedralUncertainty) -> Vec<usize> {
        (0..u.num_rows())
            .map(|m| {
                let c = self.var(format!("q[{m}]"), f64::INFINITY);
                self.lp.set_objective_coeff(c, u.rhs(m));
                c
            })
            .collect()
    }

    /// `Σ_m a_{mi} q_m` as sparse terms.
    fn dual_terms(u: &PolyhedralUncertainty, q: &[usize], i: usize) -> Vec<(usize, f64)> {
        (0..u.num_rows()).filter(|&m| u.coeff(m, i) != 0.0).map(|m| (q[m], u.coeff(m, i))).collect()
    }

    /// McCormick rows for `prod = a·b` with `a, b ∈ [0, 1]`.
    fn mccormick(&mut self, prod: usize, a: usize, b: usize) {
        self.row(vec![(prod, 1.0), (a, -1.0)], Relation::Le, 0.0);
        self.row(vec![(prod, 1.0), (b, -1.0)], Relation::Le, 0.0);
        self.row(vec![(prod, 1.0), (a, -1.0), (b, -1.0)], Relation::Ge, -1.0);
    }

    fn finish(self) -> MixedIntegerProgram {
        MixedIntegerProgram::new(self.lp, self.binary).expect("builders emit valid programs")
    }
}

/// Builds the MILP for `kind`. Every model minimizes `Σ b_m q_m`.
pub fn build_model(kind: ModelKind, inst: &Instance, u: &PolyhedralUncertainty, delta: usize)
    -> Result<MixedIntegerProgram, CoreError>
{
    check_len(inst.n(), u.n())?;
    Ok(match kind {
        ModelKind::General { k } => {
            if k == 0 {
                return Err(CoreError::InvalidInstance("the general model needs K ≥ 1".into()));
            }
            general::build(inst.n(), u, delta, k)
        }
        ModelKind::Matching => matching::build(inst.n(), u, delta),
        ModelKind::Assignment => assignment::build(inst.n(), u, delta),
    })
}

/// Model in the plain-text LP dump format.
pub fn dump_model(kind: ModelKind, inst: &Instance, u: &PolyhedralUncertainty, delta: usize) -> Result<String, CoreError> {
    Ok(write_dump(&build_model(kind, inst, u, delta)?.lp))
}

/// Root LP value with every binary relaxed to `[0, 1]`.
pub fn lp_relaxation_value(kind: ModelKind, inst: &Instance, u: &PolyhedralUncertainty, delta: usize)
    -> Result<f64, CoreError>
{
    let mip = build_model(kind, inst, u, delta)?;
    let sol = solve_lp(&mip.lp, &LpTolerances::default())?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        s => Err(CoreError::LpStatus { status: status_name(s), context: format!("{kind} relaxation") }),
    }
}

#[derive(Clone, Debug, Default)]
pub struct RecoverableConfig {
    pub milp: SolveConfig,
    /// First-stage schedule to complete into a full starting incumbent.
    pub warm_start: Option<Schedule>,
}

#[derive(Clone, Debug)]
pub struct RecoverableSolution {
    pub kind: ModelKind,
    pub status: MilpStatus,
    pub first_stage: Option<Schedule>,
    /// Incumbent objective (`+inf` without an incumbent).
    pub value: f64,
    pub bound: f64,
    pub nodes: usize,
    pub wall_time: f64,
    pub warm_start: Option<WarmStartCheck>,
    /// Objective of the completed warm start, when one was supplied.
    pub warm_start_value: Option<f64>,
    pub log: Vec<IncumbentEvent>,
    names: Vec<String>,
    values: Vec<f64>,
}

impl RecoverableSolution {
    /// Value of a named incumbent column such as `"q[3]"`.
    pub fn var(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|s| s == name).and_then(|c| self.values.get(c).copied())
    }

    /// All incumbent columns of one block, e.g. `block("z")`.
    pub fn block(&self, prefix: &str) -> Vec<(&str, f64)> {
        let head = format!("{prefix}[");
        self.names
            .iter()
            .zip(&self.values)
            .filter(|(s, _)| s.starts_with(&head))
            .map(|(s, &v)| (s.as_str(), v))
            .collect()
    }
}

/// Completes a first-stage schedule into a feasible point of `mip`.
///
/// `x` is fixed to the schedule (and, in the general model, every candidate to
/// the identity recovery with all weight on the first); the remaining
/// continuous columns are then set by solving the LP.
pub fn complete_warm_start(kind: ModelKind, mip: &MixedIntegerProgram, schedule: &Schedule) -> Result<Vec<f64>, CoreError> {
    let index = mip.lp.name_index();
    let n = schedule.n();
    let mut lo = mip.lp.lower().to_vec();
    let mut hi = mip.lp.upper().to_vec();
    let mut fix = |name: String, v: f64| -> Result<(), CoreError> {
        let c = *index
            .get(name.as_str())
            .ok_or_else(|| CoreError::InvalidSchedule(format!("model has no column {name}")))?;
        lo[c] = v;
        hi[c] = v;
        Ok(())
    };
    let x = schedule.assignment_matrix();
    for i in 0..n {
        for l in 0..n {
            fix(format!("x[{i}][{l}]"), x[i][l])?;
        }
    }
    if let ModelKind::General { k } = kind {
        for kk in 0..k {
            for i in 0..n {
                for i2 in 0..n {
                    fix(format!("z[{kk}][{i}][{i2}]"), if i == i2 { 1.0 } else { 0.0 })?;
                }
            }
            fix(format!("mu[{kk}]"), if kk == 0 { 1.0 } else { 0.0 })?;
        }
    }
    let sol = solve_lp_with_bounds(&mip.lp, &lo, &hi, &LpTolerances::default())?;
    if sol.status != LpStatus::Optimal {
        return Err(CoreError::LpStatus { status: status_name(sol.status), context: "warm-start completion".into() });
    }
    let mut v = sol.x;
    for &c in &mip.binary {
        v[c] = v[c].round();
    }
    Ok(v)
}

/// Builds and solves `kind` with branch-and-bound.
pub fn solve_recoverable(
    kind: ModelKind,
    inst: &Instance,
    u: &PolyhedralUncertainty,
    delta: usize,
    cfg: &RecoverableConfig,
) -> Result<RecoverableSolution, CoreError> {
    let mip = build_model(kind, inst, u, delta)?;
    let mut milp_cfg = cfg.milp.clone();
    let mut warm_start_value = None;
    if let Some(s) = &cfg.warm_start {
        check_len(inst.n(), s.n())?;
        let v = complete_warm_start(kind, &mip, s)?;
        warm_start_value = Some(mip.lp.evaluate(&v));
        milp_cfg.warm_start = Some(v);
    }
    let sol = rrs_lp::solve_milp(&mip, &milp_cfg)?;
    let n = inst.n();
    let first_stage = match &sol.incumbent {
        Some(v) => {
            let index = mip.lp.name_index();
            let x: Vec<Vec<f64>> =
                (0..n).map(|i| (0..n).map(|l| v[index[format!("x[{i}][{l}]").as_str()]]).collect()).collect();
            Some(Schedule::from_assignment(&x, 1e-4)?)
        }
        None => None,
    };
    Ok(RecoverableSolution {
        kind,
        status: sol.status,
        first_stage,
        value: sol.objective.unwrap_or(f64::INFINITY),
        bound: sol.bound,
        nodes: sol.nodes,
        wall_time: sol.wall_time,
        warm_start: sol.warm_start,
        warm_start_value,
        log: sol.log,
        names: mip.lp.names().to_vec(),
        values: sol.incumbent.unwrap_or_default(),
    })
}
