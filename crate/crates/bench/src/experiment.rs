//! Sweeps over instances, budgets and recovery limits.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rrs_core::heuristics::{minmax_solve, run_heuristic, Method, SortingKey};
use rrs_core::{
    budgeted_to_polyhedral, solve_recoverable, BudgetedParams, Instance, ModelKind, PolyhedralUncertainty,
    RecoverableConfig, Schedule,
};
use rrs_lp::{MilpStatus, SolveConfig};
use serde::{Deserialize, Serialize};

use crate::error::BenchError;
use crate::rng::generate_instances;

/// A compact model, optionally seeded with the min-max schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub warm_start: bool,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, warm_start: bool) -> Self {
        Self { kind, warm_start }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, if self.warm_start { "+ws" } else { "" })
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub gammas: Vec<f64>,
    pub deltas: Vec<usize>,
    pub instances_per_cell: usize,
    pub models: Vec<ModelSpec>,
    /// Per solve.
    pub time_limit: Duration,
    /// Also run the three heuristics; their values enter `best_known`.
    pub heuristics: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            sizes: vec![10, 15, 20],
            gammas: vec![3.0, 5.0, 7.0],
            deltas: vec![0, 1, 2, 3],
            instances_per_cell: 20,
            models: [ModelKind::General { k: 2 }, ModelKind::Matching, ModelKind::Assignment]
                .into_iter()
                .flat_map(|k| [ModelSpec::new(k, false), ModelSpec::new(k, true)])
                .collect(),
            time_limit: Duration::from_secs(600),
            heuristics: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let empty = [
            ("sizes", self.sizes.is_empty()),
            ("gammas", self.gammas.is_empty()),
            ("deltas", self.deltas.is_empty()),
            ("models", self.models.is_empty() && !self.heuristics),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(BenchError::Config(format!("{name} must not be empty")));
        }
        if self.instances_per_cell == 0 || self.sizes.contains(&0) {
            return Err(BenchError::Config("instance counts and sizes must be positive".into()));
        }
        if let Some(g) = self.gammas.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(BenchError::Config(format!("budget {g} must be a nonnegative number")));
        }
        if self.time_limit.is_zero() {
            return Err(BenchError::Config("time limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    TimeLimit,
    Infeasible,
    Error,
    /// Heuristic run: `ub` is an evaluated schedule, there is no bound.
    Heuristic,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::TimeLimit => "time_limit",
            Status::Infeasible => "infeasible",
            Status::Error => "error",
            Status::Heuristic => "heuristic",
        }
    }
}

impl From<MilpStatus> for Status {
    fn from(s: MilpStatus) -> Self {
        match s {
            MilpStatus::Optimal => Status::Optimal,
            MilpStatus::TimeLimit => Status::TimeLimit,
            MilpStatus::Infeasible => Status::Infeasible,
        }
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Status::Optimal, Status::TimeLimit, Status::Infeasible, Status::Error, Status::Heuristic]
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown status {s:?}"))
    }
}

/// One run. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub instance: String,
    pub model: String,
    pub warm_start: bool,
    pub n: usize,
    pub gamma: f64,
    pub delta: usize,
    pub status: Status,
    pub time_s: f64,
    pub ub: Option<f64>,
    pub lb: Option<f64>,
    pub lbgap_pct: Option<f64>,
    pub ubgap_pct: Option<f64>,
    pub best_known: f64,
}

impl ResultRecord {
    /// Key of the `(instance, Γ, Δ)` problem this run belongs to.
    pub fn problem(&self) -> (String, u64, usize) {
        (self.instance.clone(), self.gamma.to_bits(), self.delta)
    }

    pub fn solved(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// Generates `instances_per_cell` instances per size and runs the sweep.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>, BenchError> {
    cfg.validate()?;
    let mut instances = Vec::new();
    for &n in &cfg.sizes {
        instances.extend(generate_instances(cfg.seed, n, cfg.instances_per_cell)?);
    }
    run_on_instances(cfg, &instances)
}

/// Runs the sweep on supplied instances (`sizes`, `seed` and counts are ignored).
///
/// Failed solves become [`Status::Error`] records; the sweep always completes.
/// Warm-started runs include the time spent computing the min-max schedule.
pub fn run_on_instances(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Vec<ResultRecord>, BenchError> {
    cfg.validate()?;
    let milp = SolveConfig { time_limit: cfg.time_limit, ..SolveConfig::default() };
    let mut out = Vec::new();
    for inst in instances {
        for &gamma in &cfg.gammas {
            let u = budgeted_to_polyhedral(inst, BudgetedParams { gamma })?;
            let warm = if cfg.models.iter().any(|m| m.warm_start) {
                let t = Instant::now();
                let ws = minmax_solve(inst, &u, 0, &milp).ok().map(|h| h.schedule);
                Some((ws, t.elapsed().as_secs_f64()))
            } else {
                None
            };
            for &delta in &cfg.deltas {
                let mut group = Vec::new();
                if cfg.heuristics {
                    for method in Method::ALL {
                        group.push(heuristic_record(inst, &u, gamma, delta, method, &milp));
                    }
                }
                for spec in &cfg.models {
                    let ws = if spec.warm_start { warm.as_ref() } else { None };
                    group.push(model_record(inst, &u, gamma, delta, *spec, ws, &milp));
                }
                fill_gaps(&mut group);
                out.extend(group);
            }
        }
    }
    Ok(out)
}

fn base(inst: &Instance, model: String, warm_start: bool, gamma: f64, delta: usize) -> ResultRecord {
    ResultRecord {
        instance: inst.id.clone(),
        model,
        warm_start,
        n: inst.n(),
        gamma,
        delta,
        status: Status::Error,
        time_s: 0.0,
        ub: None,
        lb: None,
        lbgap_pct: None,
        ubgap_pct: None,
        best_known: f64::INFINITY,
    }
}

fn heuristic_record(inst: &Instance, u: &PolyhedralUncertainty, gamma: f64, delta: usize, method: Method, milp: &SolveConfig)
    -> ResultRecord
{
    let mut r = base(inst, method.to_string(), false, gamma, delta);
    let t = Instant::now();
    if let Ok(h) = run_heuristic(method, inst, u, delta, SortingKey::default(), milp) {
        r.status = Status::Heuristic;
        r.ub = Some(h.value);
    }
    r.time_s = t.elapsed().as_secs_f64();
    r
}

fn model_record(
    inst: &Instance,
    u: &PolyhedralUncertainty,
    gamma: f64,
    delta: usize,
    spec: ModelSpec,
    warm: Option<&(Option<Schedule>, f64)>,
    milp: &SolveConfig,
) -> ResultRecord {
    let mut r = base(inst, spec.kind.tag(), spec.warm_start, gamma, delta);
    let (warm_start, extra) = match warm {
        Some((s, t)) => (s.clone(), *t),
        None => (None, 0.0),
    };
    let cfg = RecoverableConfig { milp: milp.clone(), warm_start };
    let t = Instant::now();
    if let Ok(sol) = solve_recoverable(spec.kind, inst, u, delta, &cfg) {
        r.status = sol.status.into();
        r.ub = sol.value.is_finite().then_some(sol.value);
        r.lb = sol.bound.is_finite().then_some(sol.bound);
    }
    r.time_s = t.elapsed().as_secs_f64() + extra;
    r
}

/// Percentage of `best`; differences within `1e-9` relative count as zero.
fn pct(num: f64, best: f64) -> f64 {
    if num <= 1e-9 * best.abs() {
        0.0
    } else if best == 0.0 {
        f64::INFINITY
    } else {
        100.0 * num / best.abs()
    }
}

/// Sets `best_known` to the smallest `ub` of the group and the gaps against it.
fn fill_gaps(group: &mut [ResultRecord]) {
    let best = group.iter().filter_map(|r| r.ub).fold(f64::INFINITY, f64::min);
    for r in group {
        r.best_known = best;
        if !best.is_finite() {
            continue;
        }
        r.ubgap_pct = r.ub.map(|ub| pct(ub - best, best));
        if r.status != Status::Heuristic {
            r.lbgap_pct = r.lb.map(|lb| pct(best - lb, best));
        }
    }
}

/// One row of a per-cell table: averages over the instances of `(n, Γ, Δ, model)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub gamma: f64,
    pub delta: usize,
    pub model: String,
    pub warm_start: bool,
    /// Mean time over solved runs.
    pub time: Option<f64>,
    /// Mean gaps over unsolved runs.
    pub lbgap: Option<f64>,
    pub ubgap: Option<f64>,
    pub solved: usize,
    pub runs: usize,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (c > 0).then(|| s / c as f64)
}

/// Per-cell table rows, grouped by model in order of first appearance, then by `(n, Γ, Δ)`.
/// Heuristic runs are left out.
pub fn aggregate(records: &[ResultRecord]) -> Vec<CellSummary> {
    let mut models: Vec<(String, bool)> = Vec::new();
    let mut cells: BTreeMap<(usize, usize, u64, usize), Vec<&ResultRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.status != Status::Heuristic) {
        let key = (r.model.clone(), r.warm_start);
        let m = models.iter().position(|k| *k == key).unwrap_or_else(|| {
            models.push(key);
            models.len() - 1
        });
        cells.entry((m, r.n, ordered_bits(r.gamma), r.delta)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((m, n, _, delta), rs)| {
            let unsolved = || rs.iter().filter(|r| !r.solved());
            CellSummary {
                n,
                gamma: rs[0].gamma,
                delta,
                model: models[m].0.clone(),
                warm_start: models[m].1,
                time: mean(rs.iter().filter(|r| r.solved()).map(|r| r.time_s)),
                lbgap: mean(unsolved().filter_map(|r| r.lbgap_pct)),
                ubgap: mean(unsolved().filter_map(|r| r.ubgap_pct)),
                solved: rs.iter().filter(|r| r.solved()).count(),
                runs: rs.len(),
            }
        })
        .collect()
}

/// Sort key for nonnegative floats (`-0.0` folds into `0.0`).
fn ordered_bits(x: f64) -> u64 {
    (x + 0.0).to_bits()
}

/// Average best known value per `(n, Γ, Δ)`, with the change against the first
/// (smallest `Γ`, then smallest `Δ`) row of the same `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestRow {
    pub n: usize,
    pub gamma: f64,
    pub delta: usize,
    pub avg_best: f64,
    pub pct_diff: f64,
    pub instances: usize,
}

pub fn best_known_table(records: &[ResultRecord]) -> Vec<BestRow> {
    let mut problems: BTreeMap<(usize, u64, usize), BTreeMap<String, f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.best_known.is_finite()) {
        problems.entry((r.n, ordered_bits(r.gamma), r.delta)).or_default().insert(r.instance.clone(), r.best_known);
    }
    let mut rows: Vec<BestRow> = problems
        .into_iter()
        .map(|((n, g, delta), v)| BestRow {
            n,
            gamma: f64::from_bits(g),
            delta,
            avg_best: v.values().sum::<f64>() / v.len() as f64,
            pct_diff: 0.0,
            instances: v.len(),
        })
        .collect();
    let mut first: BTreeMap<usize, f64> = BTreeMap::new();
    for row in &mut rows {
        let base = *first.entry(row.n).or_insert(row.avg_best);
        row.pct_diff = if base == 0.0 { 0.0 } else { 100.0 * (row.avg_best - base) / base.abs() };
    }
    rows
}
