//! Exhaustive reference solvers for small instances.

use rrs_lp::{solve_lp, LinearProgram, LpStatus, LpTolerances, Relation, Sense};

use crate::error::{check_len, CoreError};
use crate::instance::{apply_swaps, schedule_cost, RecoveryMatching, Schedule};
use crate::subproblems::{AdversarialResult, IncrementalResult};
use crate::uncertainty::{status_name, PolyhedralUncertainty};

/// Hard ceiling on `max_n`.
pub const FACTORIAL_GUARD: usize = 9;

/// Extra jobs allowed beyond `max_n` when only recoveries are enumerated.
const RECOVERY_MARGIN: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_n: usize,
    pub max_recoveries: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { max_n: 7, max_recoveries: 1_000_000 }
    }
}

impl OracleBudget {
    pub fn new(max_n: usize) -> Result<Self, CoreError> {
        if max_n > FACTORIAL_GUARD {
            return Err(CoreError::OracleGuard(format!("max_n = {max_n} exceeds {FACTORIAL_GUARD}")));
        }
        Ok(Self { max_n, ..Self::default() })
    }

    fn check_recoveries(&self, n: usize, delta: usize) -> Result<(), CoreError> {
        if n > self.max_n + RECOVERY_MARGIN {
            return Err(CoreError::OracleGuard(format!("n = {n} exceeds {}", self.max_n + RECOVERY_MARGIN)));
        }
        let count = count_recoveries(n, delta);
        if count > self.max_recoveries {
            return Err(CoreError::OracleGuard(format!("{count} recoveries exceed the cap {}", self.max_recoveries)));
        }
        Ok(())
    }
}

/// Number of sets of at most `delta` disjoint job pairs on `n` jobs.
pub fn count_recoveries(n: usize, delta: usize) -> u64 {
    // t[m][k]: matchings with exactly k edges on m vertices
    let kmax = delta.min(n / 2);
    let mut t = vec![vec![0u64; kmax + 1]; n + 1];
    for m in 0..=n {
        t[m][0] = 1;
        if m < 2 {
            continue;
        }
        for k in 1..=kmax {
            t[m][k] = t[m - 1][k].saturating_add(((m - 1) as u64).saturating_mul(t[m - 2][k - 1]));
        }
    }
    t[n].iter().fold(0u64, |a, &b| a.saturating_add(b))
}

/// All sets of at most `delta` disjoint pairs. The empty recovery comes first;
/// each set is built by pairing the smallest still-free job or leaving it alone.
pub fn recoveries(n: usize, delta: usize) -> Vec<RecoveryMatching> {
    fn rec(free: &mut Vec<bool>, start: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<RecoveryMatching>) {
        out.push(RecoveryMatching::new(cur.iter().copied()).expect("pairs are disjoint"));
        if left == 0 {
            return;
        }
        for i in start..free.len() {
            if !free[i] {
                continue;
            }
            free[i] = false;
            for j in i + 1..free.len() {
                if free[j] {
                    free[j] = false;
                    cur.push((i, j));
                    rec(free, i + 1, left - 1, cur, out);
                    cur.pop();
                    free[j] = true;
                }
            }
            free[i] = true;
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![true; n], 0, delta, &mut Vec::new(), &mut out);
    out
}

/// Exact incremental value by enumerating every recovery.
pub fn brute_inc(x: &Schedule, p: &[f64], delta: usize, budget: &OracleBudget) -> Result<IncrementalResult, CoreError> {
    check_len(x.n(), p.len())?;
    budget.check_recoveries(x.n(), delta)?;
    let mut best: Option<(f64, RecoveryMatching, Schedule)> = None;
    for m in recoveries(x.n(), delta) {
        let y = apply_swaps(x, &m)?;
        let v = schedule_cost(&y, p)?;
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, m, y));
        }
    }
    let (value, matching, second_stage) = best.expect("the empty recovery always exists");
    Ok(IncrementalResult { value, matching, second_stage, relaxation: Vec::new(), perturbed: false })
}

/// Exact adversarial value: `max t` subject to `t ≤ cost(y, p)` for every recovery `y`, `p ∈ U`.
pub fn brute_adv(x: &Schedule, u: &PolyhedralUncertainty, delta: usize, budget: &OracleBudget)
    -> Result<AdversarialResult, CoreError>
{
    let n = x.n();
    check_len(n, u.n())?;
    budget.check_recoveries(n, delta)?;
    let mut lp = LinearProgram::new(Sense::Maximize);
    let p = u.add_to_lp(&mut lp, "p", &vec![0.0; n]);
    let t = lp.add_var("t", f64::NEG_INFINITY, f64::INFINITY, 1.0);
    for m in recoveries(n, delta) {
        let y = apply_swaps(x, &m)?;
        let mut row: Vec<(usize, f64)> = y.perm().iter().enumerate().map(|(l, &j)| (p[j], -((n - l) as f64))).collect();
        row.push((t, 1.0));
        lp.add_constraint(row, Relation::Le, 0.0);
    }
    let sol = solve_lp(&lp, &LpTolerances::default())?;
    if sol.status != LpStatus::Optimal {
        return Err(CoreError::LpStatus { status: status_name(sol.status), context: "oracle adversarial LP".into() });
    }
    Ok(AdversarialResult { value: sol.objective, worst_scenario: p.iter().map(|&c| sol.x[c].max(0.0)).collect() })
}

/// Advances `perm` to the next permutation in lexicographic order.
fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = perm.iter().rposition(|&v| v > perm[i]).expect("a larger element exists");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// Exact recoverable robust optimum: the best `brute_adv` over all `n!` first stages.
///
/// Ties keep the lexicographically smallest schedule.
pub fn brute_recoverable(u: &PolyhedralUncertainty, delta: usize, budget: &OracleBudget)
    -> Result<(f64, Schedule), CoreError>
{
    let n = u.n();
    if n > budget.max_n || n > FACTORIAL_GUARD {
        return Err(CoreError::OracleGuard(format!("n = {n} exceeds max_n = {}", budget.max_n)));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Schedule)> = None;
    loop {
        let x = Schedule::new(perm.clone())?;
        let v = brute_adv(&x, u, delta, budget)?.value;
        if best.as_ref().is_none_or(|b| v < b.0 - 1e-9 * (1.0 + b.0.abs())) {
            best = Some((v, x));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("at least one schedule"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::uncertainty::{budgeted_to_polyhedral, BudgetedParams};

    fn two_job_set() -> PolyhedralUncertainty {
        PolyhedralUncertainty::from_rows(2, [(vec![1.0, 0.0], 3.0), (vec![0.0, 1.0], 3.0), (vec![1.0, 2.0], 7.0)])
            .unwrap()
    }

    #[test]
    fn recovery_enumeration() {
        let all = recoveries(3, 1);
        assert_eq!(all.len(), 4);
        assert!(all[0].is_empty());
        for (n, d) in [(4, 2), (5, 2), (6, 3), (7, 1), (7, 3)] {
            let list = recoveries(n, d);
            assert_eq!(list.len() as u64, count_recoveries(n, d));
            let mut uniq = list.clone();
            uniq.sort_by_key(|m| m.swaps().to_vec());
            uniq.dedup();
            assert_eq!(uniq.len(), list.len());
        }
        // involutions of 4 elements
        assert_eq!(count_recoveries(4, 2), 10);
        assert_eq!(count_recoveries(1, 3), 1);
    }

    #[test]
    fn hand_checked_incremental() {
        let b = OracleBudget::default();
        let x = Schedule::identity(3);
        let r = brute_inc(&x, &[3.0, 2.0, 1.0], 1, &b).unwrap();
        assert_eq!(r.value, 10.0);
        assert_eq!(r.matching.swaps(), &[(0, 2)]);
        assert_eq!(brute_inc(&x, &[3.0, 2.0, 1.0], 0, &b).unwrap().value, 14.0);
        assert_eq!(brute_inc(&x, &[2.0, 2.0, 2.0], 1, &b).unwrap().value, 12.0);
    }

    #[test]
    fn hand_checked_adversarial() {
        let b = OracleBudget::default();
        let u = two_job_set();
        for x in [Schedule::identity(2), Schedule::from_one_based(&[2, 1]).unwrap()] {
            assert!((brute_adv(&x, &u, 1, &b).unwrap().value - 7.0).abs() < 1e-9);
        }
        assert!((brute_adv(&Schedule::identity(2), &u, 0, &b).unwrap().value - 8.0).abs() < 1e-9);
        let (v, x) = brute_recoverable(&u, 1, &b).unwrap();
        assert!((v - 7.0).abs() < 1e-9);
        assert_eq!(x, Schedule::identity(2));
    }

    #[test]
    fn degenerate_sets() {
        let b = OracleBudget::default();
        let inst = Instance::new("d", vec![4.0, 1.0, 3.0], vec![5.0, 5.0, 5.0]).unwrap();
        let u = budgeted_to_polyhedral(&inst, BudgetedParams { gamma: 0.0 }).unwrap();
        let (v, x) = brute_recoverable(&u, 1, &b).unwrap();
        assert!((v - 13.0).abs() < 1e-9);
        // (1,3,2) is the smallest schedule one swap away from SPT order (2,3,1)
        assert_eq!(x.one_based(), vec![1, 3, 2]);
        let single = PolyhedralUncertainty::from_rows(1, [(vec![1.0], 6.0)]).unwrap();
        assert!((brute_recoverable(&single, 2, &b).unwrap().0 - 6.0).abs() < 1e-9);
    }

    #[test]
    fn guards() {
        assert!(OracleBudget::new(10).is_err());
        let b = OracleBudget::new(3).unwrap();
        let u = PolyhedralUncertainty::from_rows(4, []).unwrap();
        assert!(matches!(brute_recoverable(&u, 1, &b), Err(CoreError::OracleGuard(_))));
        let tight = OracleBudget { max_n: 7, max_recoveries: 3 };
        assert!(brute_inc(&Schedule::identity(3), &[1.0; 3], 1, &tight).is_err());
    }
}
