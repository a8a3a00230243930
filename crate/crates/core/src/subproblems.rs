//! Incremental and adversarial problems for a fixed first-stage schedule.
//!
//! Both incremental formulations are solved as plain LPs without odd-cycle
//! rows. Their relaxations have integral optima, so a fractional answer is
//! reported as [`CoreError::IntegralityViolation`] rather than rounded.

use rrs_lp::{solve_lp, LinearProgram, LpSolution, LpStatus, LpTolerances, Relation, Sense};

use crate::error::{check_len, CoreError};
use crate::instance::{apply_swaps, schedule_cost, RecoveryMatching, Schedule};
use crate::uncertainty::{status_name, PolyhedralUncertainty};

/// Distance from {0, 1} tolerated in LP answers.
pub const INT_TOL: f64 = 1e-6;

/// Size of the tie-breaking objective perturbation, relative to the largest coefficient.
const PERTURBATION: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct IncrementalResult {
    pub value: f64,
    pub matching: RecoveryMatching,
    pub second_stage: Schedule,
    /// LP values of the recovery variables: `z` over edges `(i, j), i < j` in
    /// lexicographic order, or the row-major `y` matrix.
    pub relaxation: Vec<f64>,
    /// Whether the perturbed re-solve was needed.
    pub perturbed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversarialResult {
    pub value: f64,
    pub worst_scenario: Vec<f64>,
}

/// Cost decrease from swapping jobs `i` and `j` in `x`: `(p_i − p_j)(pos(j) − pos(i))`.
pub fn swap_gain(i: usize, j: usize, p: &[f64], x: &Schedule) -> f64 {
    let pos = x.positions();
    (p[i] - p[j]) * (pos[j] as f64 - pos[i] as f64)
}

/// Edges `(i, j)` with `i < j`, in the column order used by every matching formulation.
pub fn edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn is_binary(v: f64) -> bool {
    v.abs() <= INT_TOL || (v - 1.0).abs() <= INT_TOL
}

fn optimal(sol: LpSolution, context: &str) -> Result<LpSolution, CoreError> {
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        s => Err(CoreError::LpStatus { status: status_name(s), context: context.into() }),
    }
}

/// Solves `lp`; if the columns in `watch` are not all binary, re-solves once with
/// objective coefficient `k` shifted by `ε·(k+1)` in the improving direction.
fn solve_integral(mut lp: LinearProgram, watch: &[usize], names: impl Fn(usize) -> String, context: &str)
    -> Result<(Vec<f64>, bool), CoreError>
{
    let tol = LpTolerances::default();
    let sol = optimal(solve_lp(&lp, &tol)?, context)?;
    if watch.iter().all(|&c| is_binary(sol.x[c])) {
        return Ok((sol.x, false));
    }
    let scale = lp.objective().iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let eps = PERTURBATION * scale / watch.len() as f64;
    let dir = if lp.sense() == Sense::Maximize { 1.0 } else { -1.0 };
    for (k, &c) in watch.iter().enumerate() {
        let v = lp.objective()[c] + dir * eps * (k + 1) as f64;
        lp.set_objective_coeff(c, v);
    }
    let sol = optimal(solve_lp(&lp, &tol)?, context)?;
    if let Some(k) = watch.iter().position(|&c| !is_binary(sol.x[c])) {
        return Err(CoreError::IntegralityViolation { var: names(k), value: sol.x[watch[k]] });
    }
    Ok((sol.x, true))
}

fn finish(x: &Schedule, p: &[f64], pairs: Vec<(usize, usize)>, relaxation: Vec<f64>, perturbed: bool)
    -> Result<IncrementalResult, CoreError>
{
    let matching = RecoveryMatching::new(pairs)?;
    let second_stage = apply_swaps(x, &matching)?;
    let value = schedule_cost(&second_stage, p)?;
    Ok(IncrementalResult { value, matching, second_stage, relaxation, perturbed })
}

/// Best recovery by at most `delta` disjoint swaps, via the cardinality-constrained matching LP.
pub fn incremental_matching(x: &Schedule, p: &[f64], delta: usize) -> Result<IncrementalResult, CoreError> {
    let n = x.n();
    check_len(n, p.len())?;
    let es = edges(n);
    let mut lp = LinearProgram::new(Sense::Maximize);
    let cols: Vec<usize> =
        es.iter().map(|&(i, j)| lp.add_var(format!("z[{i}][{j}]"), 0.0, f64::INFINITY, swap_gain(i, j, p, x))).collect();
    for v in 0..n {
        let row = es.iter().zip(&cols).filter(|((i, j), _)| *i == v || *j == v).map(|(_, &c)| (c, 1.0)).collect();
        lp.add_constraint(row, Relation::Le, 1.0);
    }
    lp.add_constraint(cols.iter().map(|&c| (c, 1.0)).collect(), Relation::Le, delta as f64);
    let (z, perturbed) = solve_integral(lp, &cols, |k| format!("z[{}][{}]", es[k].0 + 1, es[k].1 + 1), "incremental matching LP")?;
    let pairs = es.iter().zip(&z).filter(|(_, &v)| v > 0.5).map(|(&e, _)| e).collect();
    finish(x, p, pairs, z, perturbed)
}

/// Best recovery via the symmetric assignment LP with `Σ y_ii ≥ n − 2Δ`.
///
/// `y[i][j] = 1` puts job `i` where `x` had job `j`.
pub fn incremental_assignment(x: &Schedule, p: &[f64], delta: usize) -> Result<IncrementalResult, CoreError> {
    let n = x.n();
    check_len(n, p.len())?;
    let pos = x.positions();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let mut y = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let weight = (n - pos[j]) as f64;
            y[i][j] = lp.add_var(format!("y[{i}][{j}]"), 0.0, f64::INFINITY, p[i] * weight);
        }
    }
    for i in 0..n {
        lp.add_constraint((0..n).map(|j| (y[i][j], 1.0)).collect(), Relation::Eq, 1.0);
    }
    for j in 0..n {
        lp.add_constraint((0..n).map(|i| (y[i][j], 1.0)).collect(), Relation::Eq, 1.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            lp.add_constraint(vec![(y[i][j], 1.0), (y[j][i], -1.0)], Relation::Eq, 0.0);
        }
    }
    lp.add_constraint((0..n).map(|i| (y[i][i], 1.0)).collect(), Relation::Ge, n as f64 - 2.0 * delta as f64);
    let cols: Vec<usize> = y.iter().flatten().copied().collect();
    let (sol, perturbed) =
        solve_integral(lp, &cols, |k| format!("y[{}][{}]", k / n + 1, k % n + 1), "incremental assignment LP")?;
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if sol[y[i][j]] > 0.5 {
                pairs.push((i, j));
            }
        }
    }
    let relaxation = cols.iter().map(|&c| sol[c]).collect();
    finish(x, p, pairs, relaxation, perturbed)
}

/// Worst-case recoverable cost of `x` over `U`.
///
/// The matching LP is dualized (multipliers `α_i` for degree rows, `γ` for the
/// cardinality row), leaving one joint LP in `(p, α, γ)`.
pub fn adversarial_value(x: &Schedule, u: &PolyhedralUncertainty, delta: usize) -> Result<AdversarialResult, CoreError> {
    let n = x.n();
    check_len(n, u.n())?;
    let pos = x.positions();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let weights: Vec<f64> = (0..n).map(|i| (n - pos[i]) as f64).collect();
    let p = u.add_to_lp(&mut lp, "p", &weights);
    let alpha: Vec<usize> = (0..n).map(|i| lp.add_var(format!("alpha[{i}]"), 0.0, f64::INFINITY, -1.0)).collect();
    let gamma = lp.add_var("gamma", 0.0, f64::INFINITY, -(delta as f64));
    for (i, j) in edges(n) {
        let d = pos[j] as f64 - pos[i] as f64;
        lp.add_constraint(vec![(alpha[i], 1.0), (alpha[j], 1.0), (gamma, 1.0), (p[i], -d), (p[j], d)], Relation::Ge, 0.0);
    }
    let sol = optimal(solve_lp(&lp, &LpTolerances::default())?, "adversarial LP")?;
    let worst_scenario = p.iter().map(|&c| sol.x[c].max(0.0)).collect();
    Ok(AdversarialResult { value: sol.objective, worst_scenario })
}
