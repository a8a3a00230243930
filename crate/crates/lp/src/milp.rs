//! Best-bound branch-and-bound over LP relaxations for 0/1 mixed-integer programs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::simplex::Simplex;
use crate::{LinearProgram, LpError, LpSolution, LpStatus, LpTolerances, Sense};

#[derive(thiserror::Error, Debug)]
pub enum MilpError {
    #[error("invalid mixed-integer program: {0}")]
    Invalid(String),
    #[error("LP relaxation failed at node {node}: {source}")]
    Lp {
        node: usize,
        #[source]
        source: LpError,
    },
    #[error("LP relaxation unbounded at node {node}")]
    Unbounded { node: usize },
}

/// A linear program with a subset of variables restricted to `{0, 1}`.
#[derive(Clone, Debug)]
pub struct MixedIntegerProgram {
    pub lp: LinearProgram,
    pub binary: Vec<usize>,
}

impl MixedIntegerProgram {
    /// Validates the program; binary variables must carry bounds inside `[0, 1]`.
    pub fn new(lp: LinearProgram, mut binary: Vec<usize>) -> Result<Self, MilpError> {
        lp.validate().map_err(|e| MilpError::Invalid(e.to_string()))?;
        binary.sort_unstable();
        binary.dedup();
        for &j in &binary {
            if j >= lp.num_vars() {
                return Err(MilpError::Invalid(format!("binary index {j} out of range")));
            }
            if lp.lower()[j] < 0.0 || lp.upper()[j] > 1.0 {
                return Err(MilpError::Invalid(format!(
                    "binary variable {} has bounds [{}, {}]",
                    lp.name(j),
                    lp.lower()[j],
                    lp.upper()[j]
                )));
            }
        }
        Ok(Self { lp, binary })
    }

    /// The same program with every binary relaxed to `[0, 1]`.
    pub fn relaxation(&self) -> &LinearProgram {
        &self.lp
    }
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub time_limit: Duration,
    pub int_tol: f64,
    /// Relative gap `(ub - lb) / max(1, |ub|)` at which the search stops.
    pub gap_tol: f64,
    /// Candidate incumbent installed before the root solve if it passes
    /// [`warm_start_check`].
    pub warm_start: Option<Vec<f64>>,
    pub lp_tol: LpTolerances,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            time_limit: Duration::from_secs(600),
            int_tol: 1e-6,
            gap_tol: 1e-9,
            warm_start: None,
            lp_tol: LpTolerances::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MilpStatus {
    Optimal,
    TimeLimit,
    Infeasible,
}

impl MilpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MilpStatus::Optimal => "optimal",
            MilpStatus::TimeLimit => "time_limit",
            MilpStatus::Infeasible => "infeasible",
        }
    }
}

/// One line of the solve log, written whenever the incumbent improves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IncumbentEvent {
    pub time_s: f64,
    pub nodes: usize,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Clone, Debug)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub incumbent: Option<Vec<f64>>,
    /// Incumbent objective, in the program's sense.
    pub objective: Option<f64>,
    /// Best proven bound, in the program's sense.
    pub bound: f64,
    pub nodes: usize,
    pub wall_time: f64,
    pub warm_start: Option<WarmStartCheck>,
    pub log: Vec<IncumbentEvent>,
}

impl MilpSolution {
    /// Relative gap between incumbent and bound, `None` without an incumbent.
    pub fn gap(&self) -> Option<f64> {
        self.objective.map(|ub| (ub - self.bound).abs() / ub.abs().max(1.0))
    }

    /// Solve log as CSV with header `time_s,nodes,lb,ub`.
    pub fn log_csv(&self) -> String {
        let mut out = String::from("time_s,nodes,lb,ub\n");
        for ev in &self.log {
            let _ = writeln!(out, "{},{},{},{}", ev.time_s, ev.nodes, ev.lb, ev.ub);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RejectReason {
    Dimension { expected: usize, got: usize },
    Bound { var: usize },
    Row { row: usize },
    Fractional { var: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum WarmStartCheck {
    Accepted,
    Rejected(RejectReason),
}

const WARM_START_FEAS_TOL: f64 = 1e-6;

/// Accepts `x` iff it satisfies every bound and row of `mip` within `1e-6 * (1 + |rhs|)`
/// and is integral on the binary indices within `int_tol`.
pub fn warm_start_check(mip: &MixedIntegerProgram, x: &[f64], int_tol: f64) -> WarmStartCheck {
    let lp = &mip.lp;
    if x.len() != lp.num_vars() {
        return WarmStartCheck::Rejected(RejectReason::Dimension { expected: lp.num_vars(), got: x.len() });
    }
    for (j, &v) in x.iter().enumerate() {
        let slack = WARM_START_FEAS_TOL * (1.0 + v.abs());
        if !v.is_finite() || v < lp.lower()[j] - slack || v > lp.upper()[j] + slack {
            return WarmStartCheck::Rejected(RejectReason::Bound { var: j });
        }
    }
    for &j in &mip.binary {
        if (x[j] - x[j].round()).abs() > int_tol {
            return WarmStartCheck::Rejected(RejectReason::Fractional { var: j });
        }
    }
    for (r, row) in lp.constraints().iter().enumerate() {
        if row.violation(x) > WARM_START_FEAS_TOL * (1.0 + row.rhs.abs()) {
            return WarmStartCheck::Rejected(RejectReason::Row { row: r });
        }
    }
    WarmStartCheck::Accepted
}

struct Node {
    /// Parent relaxation value (internal minimization sense).
    bound: f64,
    seq: usize,
    fixes: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap: smallest bound first, then most recently created.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(self.seq.cmp(&other.seq))
    }
}

/// Scaled row violation above which a warm-started answer is recomputed cold.
const DRIFT_TOL: f64 = 1e-6;

/// Re-optimizes `warm` under the node bounds on the binary columns.
///
/// The warm tableau is never refactored, so an unbounded claim, a numerical
/// failure or a point that drifted off the rows triggers a cold solve, which
/// then becomes the new warm tableau.
fn node_relaxation(
    lp: &LinearProgram,
    warm: &mut Simplex,
    binary: &[usize],
    lower: &[f64],
    upper: &[f64],
    tol: &LpTolerances,
) -> Result<LpSolution, LpError> {
    for &j in binary {
        if warm.bounds(j) != (lower[j], upper[j]) {
            warm.set_bounds(j, lower[j], upper[j]);
        }
    }
    let trusted = match warm.optimize() {
        Ok(LpStatus::Infeasible) => Some(LpStatus::Infeasible),
        Ok(LpStatus::Optimal) if lp.max_violation(warm.x()).1 <= DRIFT_TOL => Some(LpStatus::Optimal),
        _ => None,
    };
    let status = match trusted {
        Some(status) => status,
        None => {
            *warm = Simplex::new(lp, lower, upper, *tol)?;
            warm.optimize()?
        }
    };
    Ok(warm.solution(lp, status))
}

/// Solves `mip` by best-bound branch-and-bound.
///
/// Branching picks the most fractional binary (lowest index on ties). The
/// clock is only consulted between nodes, so the tree explored up to any node
/// count is independent of timing.
pub fn solve_milp(mip: &MixedIntegerProgram, cfg: &SolveConfig) -> Result<MilpSolution, MilpError> {
    let start = Instant::now();
    let lp = &mip.lp;
    let sign = match lp.sense() {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let gap_ok = |ub: f64, lb: f64| ub - lb <= cfg.gap_tol * ub.abs().max(1.0);

    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut log = Vec::new();
    let mut warm_check = None;
    if let Some(ws) = &cfg.warm_start {
        let check = warm_start_check(mip, ws, cfg.int_tol);
        if check == WarmStartCheck::Accepted {
            let mut x = ws.clone();
            for &j in &mip.binary {
                x[j] = x[j].round();
            }
            let val = sign * lp.evaluate(&x);
            log.push(IncumbentEvent { time_s: start.elapsed().as_secs_f64(), nodes: 0, lb: sign * f64::NEG_INFINITY, ub: sign * val });
            incumbent = Some((x, val));
        }
        warm_check = Some(check);
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Node { bound: f64::NEG_INFINITY, seq, fixes: Vec::new() });
    let mut nodes = 0usize;
    let mut lower = lp.lower().to_vec();
    let mut upper = lp.upper().to_vec();
    let mut timed_out = false;
    let mut warm = Simplex::new(lp, &lower, &upper, cfg.lp_tol).map_err(|source| MilpError::Lp { node: 0, source })?;

    while let Some(node) = heap.peek() {
        if let Some((_, ub)) = &incumbent {
            if gap_ok(*ub, node.bound) {
                break;
            }
        }
        if start.elapsed() >= cfg.time_limit {
            timed_out = true;
            break;
        }
        let node = heap.pop().expect("peeked");
        for &(j, v) in &node.fixes {
            lower[j] = v;
            upper[j] = v;
        }
        let res = node_relaxation(lp, &mut warm, &mip.binary, &lower, &upper, &cfg.lp_tol);
        for &(j, _) in &node.fixes {
            lower[j] = lp.lower()[j];
            upper[j] = lp.upper()[j];
        }
        let node_id = nodes;
        nodes += 1;
        let sol = res.map_err(|source| MilpError::Lp { node: node_id, source })?;
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => return Err(MilpError::Unbounded { node: node_id }),
            LpStatus::Optimal => {}
        }
        let val = sign * sol.objective;
        if let Some((_, ub)) = &incumbent {
            if gap_ok(*ub, val) {
                continue;
            }
        }
        let mut branch: Option<(usize, f64)> = None;
        for &j in &mip.binary {
            let frac = (sol.x[j] - sol.x[j].round()).abs();
            if frac > cfg.int_tol && branch.is_none_or(|(_, f)| frac > f) {
                branch = Some((j, frac));
            }
        }
        match branch {
            None => {
                let mut x = sol.x;
                for &j in &mip.binary {
                    x[j] = x[j].round();
                }
                let val = sign * lp.evaluate(&x);
                if incumbent.as_ref().is_none_or(|(_, ub)| val < *ub) {
                    log.push(IncumbentEvent {
                        time_s: start.elapsed().as_secs_f64(),
                        nodes,
                        lb: sign * node.bound.min(val),
                        ub: sign * val,
                    });
                    incumbent = Some((x, val));
                }
            }
            Some((j, _)) => {
                for v in [0.0, 1.0] {
                    seq += 1;
                    let mut fixes = Vec::with_capacity(node.fixes.len() + 1);
                    fixes.extend_from_slice(&node.fixes);
                    fixes.push((j, v));
                    heap.push(Node { bound: val, seq, fixes });
                }
            }
        }
    }

    let open_bound = heap.peek().map(|n| n.bound);
    let wall_time = start.elapsed().as_secs_f64();
    let (status, bound) = match (&incumbent, timed_out) {
        (None, false) => (MilpStatus::Infeasible, f64::INFINITY),
        (None, true) => (MilpStatus::TimeLimit, open_bound.unwrap_or(f64::NEG_INFINITY)),
        (Some((_, ub)), true) => (MilpStatus::TimeLimit, open_bound.map_or(*ub, |b| b.min(*ub))),
        (Some((_, ub)), false) => (MilpStatus::Optimal, open_bound.map_or(*ub, |b| b.min(*ub))),
    };
    let (x, objective) = match incumbent {
        Some((x, v)) => (Some(x), Some(sign * v)),
        None => (None, None),
    };
    Ok(MilpSolution {
        status,
        incumbent: x,
        objective,
        bound: sign * bound,
        nodes,
        wall_time,
        warm_start: warm_check,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Relation;

    #[test]
    fn knapsack_pair() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let a = lp.add_var("a", 0.0, 1.0, -1.0);
        let b = lp.add_var("b", 0.0, 1.0, -1.0);
        lp.add_constraint(vec![(a, 1.0), (b, 1.0)], Relation::Le, 1.0);
        let mip = MixedIntegerProgram::new(lp, vec![a, b]).unwrap();
        let sol = solve_milp(&mip, &SolveConfig::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Optimal);
        assert_eq!(sol.objective, Some(-1.0));
        assert_eq!(sol.bound, -1.0);
    }

    #[test]
    fn fractional_root_needs_branching() {
        // max 5a + 4b + 3c  s.t. 2a + 3b + c <= 4, 4a + b + 2c <= 5
        let mut lp = LinearProgram::new(Sense::Maximize);
        let v: Vec<usize> = [5.0, 4.0, 3.0].iter().enumerate().map(|(i, &c)| lp.add_var(format!("v{i}"), 0.0, 1.0, c)).collect();
        lp.add_constraint(vec![(v[0], 2.0), (v[1], 3.0), (v[2], 1.0)], Relation::Le, 4.0);
        lp.add_constraint(vec![(v[0], 4.0), (v[1], 1.0), (v[2], 2.0)], Relation::Le, 5.0);
        let mip = MixedIntegerProgram::new(lp, v.clone()).unwrap();
        let sol = solve_milp(&mip, &SolveConfig::default()).unwrap();
        // Enumerate the 8 points.
        let mut best = f64::NEG_INFINITY;
        for mask in 0..8u32 {
            let x: Vec<f64> = (0..3).map(|i| ((mask >> i) & 1) as f64).collect();
            if mip.lp.max_violation(&x).1 == 0.0 {
                best = best.max(mip.lp.evaluate(&x));
            }
        }
        assert_eq!(sol.status, MilpStatus::Optimal);
        assert_eq!(sol.objective, Some(best));
        assert!(sol.bound >= best - 1e-9);
    }

    #[test]
    fn infeasible_program() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let a = lp.add_var("a", 0.0, 1.0, 1.0);
        let b = lp.add_var("b", 0.0, 1.0, 1.0);
        lp.add_constraint(vec![(a, 1.0), (b, 1.0)], Relation::Eq, 1.0);
        lp.add_constraint(vec![(a, 1.0), (b, -1.0)], Relation::Eq, 0.0);
        let mip = MixedIntegerProgram::new(lp, vec![a, b]).unwrap();
        let sol = solve_milp(&mip, &SolveConfig::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Infeasible);
        assert!(sol.incumbent.is_none());
    }

    #[test]
    fn binary_bounds_are_validated() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let a = lp.add_var("a", 0.0, 2.0, 1.0);
        assert!(MixedIntegerProgram::new(lp, vec![a]).is_err());
    }

    #[test]
    fn warm_start_rejections() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let a = lp.add_var("a", 0.0, 1.0, 1.0);
        let b = lp.add_var("b", 0.0, 1.0, 1.0);
        lp.add_constraint(vec![(a, 1.0), (b, 1.0)], Relation::Eq, 1.0);
        let mip = MixedIntegerProgram::new(lp, vec![a, b]).unwrap();
        assert_eq!(warm_start_check(&mip, &[1.0, 0.0], 1e-6), WarmStartCheck::Accepted);
        assert_eq!(warm_start_check(&mip, &[1.0, 1.0], 1e-6), WarmStartCheck::Rejected(RejectReason::Row { row: 0 }));
        assert_eq!(
            warm_start_check(&mip, &[0.5, 0.5], 1e-6),
            WarmStartCheck::Rejected(RejectReason::Fractional { var: 0 })
        );
        assert_eq!(
            warm_start_check(&mip, &[1.0], 1e-6),
            WarmStartCheck::Rejected(RejectReason::Dimension { expected: 2, got: 1 })
        );
    }
}
