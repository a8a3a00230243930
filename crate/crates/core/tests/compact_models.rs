#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rrs_core::heuristics::minmax_solve;
use rrs_core::oracle::{brute_recoverable, OracleBudget};
use rrs_core::subproblems::edges;
use rrs_core::*;
use rrs_lp::{solve_milp, MilpStatus, MixedIntegerProgram, SolveConfig};

fn two_job() -> (Instance, PolyhedralUncertainty) {
    let inst = Instance::new("two-job", vec![0.0, 0.0], vec![3.0, 3.0]).unwrap();
    let u = PolyhedralUncertainty::from_rows(2, [(vec![1.0, 0.0], 3.0), (vec![0.0, 1.0], 3.0), (vec![1.0, 2.0], 7.0)])
        .unwrap();
    (inst, u)
}

fn budgeted(nominal: Vec<f64>, deviation: Vec<f64>, gamma: f64) -> (Instance, PolyhedralUncertainty) {
    let inst = Instance::new("t", nominal, deviation).unwrap();
    let u = budgeted_to_polyhedral(&inst, BudgetedParams { gamma }).unwrap();
    (inst, u)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn two_job_matching_and_general_relaxations() {
    let (inst, u) = two_job();
    let m = lp_relaxation_value(ModelKind::Matching, &inst, &u, 1).unwrap();
    assert!((m - 7.0).abs() < 1e-6, "{m}");
    for k in [1, 2, 3] {
        let g = lp_relaxation_value(ModelKind::General { k }, &inst, &u, 1).unwrap();
        assert!(g.abs() < 1e-6, "K={k}: {g}");
    }
}

#[test]
fn two_job_optima() {
    let (inst, u) = two_job();
    let cfg = RecoverableConfig::default();
    for kind in [ModelKind::Matching, ModelKind::Assignment, ModelKind::general_exact(2)] {
        let sol = solve_recoverable(kind, &inst, &u, 1, &cfg).unwrap();
        assert!((sol.value - 7.0).abs() < 1e-6, "{kind}: {}", sol.value);
        let adv = adversarial_value(sol.first_stage.as_ref().unwrap(), &u, 1).unwrap();
        assert!((adv.value - sol.value).abs() < 1e-6);
        assert!(sol.bound <= sol.value + 1e-9);
    }
}

#[test]
fn structure_counts() {
    let (inst, u) = two_job();
    let a = build_model(ModelKind::Assignment, &inst, &u, 1).unwrap();
    assert_eq!(a.lp.num_vars(), 4 + 4 + 8 + 3);
    let m = build_model(ModelKind::Matching, &inst, &u, 1).unwrap();
    let names = m.lp.name_index();
    assert_eq!(names.keys().filter(|s| s.starts_with("z[")).count(), 1);
    assert_eq!(names.keys().filter(|s| s.starts_with("u[") || s.starts_with("v[")).count(), 4);
    assert_eq!(m.binary.len(), 4);
    let g = build_model(ModelKind::General { k: 3 }, &inst, &u, 1).unwrap();
    // x, mu, z, w, h, q
    assert_eq!(g.lp.num_vars(), 4 + 3 + 3 * 4 + 2 * 3 * 8 + 3);
    assert_eq!(g.binary.len(), 4 + 3 * 4);
}

#[test]
fn dumps_parse_back() {
    let (inst, u) = two_job();
    for kind in [ModelKind::Matching, ModelKind::Assignment, ModelKind::General { k: 2 }] {
        let text = dump_model(kind, &inst, &u, 1).unwrap();
        let lp = rrs_lp::parse_dump(&text).unwrap();
        assert_eq!(lp.names(), build_model(kind, &inst, &u, 1).unwrap().lp.names());
    }
}

#[test]
fn no_uncertainty_gives_spt_cost() {
    let (inst, u) = budgeted(vec![4.0, 9.0, 1.0], vec![3.0, 2.0, 8.0], 0.0);
    let spt = schedule_cost(&spt_schedule(inst.nominal()), inst.nominal()).unwrap();
    for delta in [0, 1] {
        for kind in [ModelKind::Matching, ModelKind::Assignment, ModelKind::General { k: 2 }] {
            let sol = solve_recoverable(kind, &inst, &u, delta, &RecoverableConfig::default()).unwrap();
            assert!((sol.value - spt).abs() < 1e-6, "{kind} at delta {delta}: {} vs {spt}", sol.value);
        }
    }
}

#[test]
fn single_candidate_is_minmax() {
    for (nominal, deviation, delta) in [
        (vec![5.0, 2.0, 8.0], vec![4.0, 9.0, 1.0], 1),
        (vec![3.0, 7.0, 1.0, 6.0], vec![2.0, 5.0, 8.0, 1.0], 2),
    ] {
        let (inst, u) = budgeted(nominal, deviation, 1.0);
        let g = solve_recoverable(ModelKind::General { k: 1 }, &inst, &u, delta, &RecoverableConfig::default()).unwrap();
        assert_eq!(g.status, MilpStatus::Optimal);
        let mm = minmax_solve(&inst, &u, 0, &SolveConfig::default()).unwrap();
        assert!(close(g.value, mm.value), "{} vs {}", g.value, mm.value);
    }
}

#[test]
fn continuous_products_leave_the_optimum_unchanged() {
    let (inst, u) = budgeted(vec![6.0, 2.0, 9.0], vec![5.0, 7.0, 2.0], 1.0);
    let mip = build_model(ModelKind::General { k: 2 }, &inst, &u, 1).unwrap();
    let names = mip.lp.name_index();
    let mut binary = mip.binary.clone();
    binary.extend(names.iter().filter(|(s, _)| s.starts_with("w[")).map(|(_, &c)| c));
    let strict = MixedIntegerProgram::new(mip.lp.clone(), binary).unwrap();
    let a = solve_milp(&mip, &SolveConfig::default()).unwrap();
    let b = solve_milp(&strict, &SolveConfig::default()).unwrap();
    assert_eq!(a.status, MilpStatus::Optimal);
    assert_eq!(b.status, MilpStatus::Optimal);
    assert!(close(a.objective.unwrap(), b.objective.unwrap()));
}

fn instance_strategy(max_n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2..=max_n).prop_flat_map(|n| {
        (prop::collection::vec(1u32..=100, n), prop::collection::vec(1u32..=100, n))
            .prop_map(|(a, b)| (a.into_iter().map(f64::from).collect(), b.into_iter().map(f64::from).collect()))
    })
}

/// Doubly stochastic matrix as a convex mix of two permutations.
fn mixed_assignment(n: usize, shift: usize, lambda: f64) -> Vec<Vec<f64>> {
    let mut x = vec![vec![0.0; n]; n];
    for i in 0..n {
        x[i][i] += lambda;
        x[i][(i + shift) % n] += 1.0 - lambda;
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_models_match_the_oracle((nominal, deviation) in instance_strategy(4), gamma in 0u32..=3, delta in 0usize..=2) {
        let (inst, u) = budgeted(nominal, deviation, f64::from(gamma));
        let (best, _) = brute_recoverable(&u, delta, &OracleBudget::default()).unwrap();
        for kind in [ModelKind::Matching, ModelKind::Assignment] {
            let sol = solve_recoverable(kind, &inst, &u, delta, &RecoverableConfig::default()).unwrap();
            prop_assert_eq!(sol.status, MilpStatus::Optimal);
            prop_assert!(close(sol.value, best), "{}: {} vs oracle {}", kind, sol.value, best);
            let adv = adversarial_value(sol.first_stage.as_ref().unwrap(), &u, delta).unwrap();
            prop_assert!(close(adv.value, sol.value));
            let relax = lp_relaxation_value(kind, &inst, &u, delta).unwrap();
            prop_assert!(relax <= sol.value + 1e-6 * sol.value.abs().max(1.0));
        }
    }

    #[test]
    fn phi_keeps_nonlinear_rows_feasible(
        n in 2usize..=7,
        delta in 0usize..=3,
        shift in 0usize..7,
        lambda in 0.0f64..=1.0,
        raw in prop::collection::vec(0.0f64..1.0, 21),
        extra in prop::collection::vec(0.0f64..5.0, 15),
        (nominal, deviation) in instance_strategy(7),
    ) {
        let es = edges(n);
        // scale a random edge vector into the degree and budget rows
        let mut z: Vec<f64> = es.iter().zip(&raw).map(|(_, &v)| v).collect();
        let mut degree = vec![0.0f64; n];
        for (&(i, j), &v) in es.iter().zip(&z) {
            degree[i] += v;
            degree[j] += v;
        }
        let peak = degree.iter().cloned().fold(0.0, f64::max).max(1.0);
        let total: f64 = z.iter().sum::<f64>() / peak;
        let scale = 1.0 / peak * if total > delta as f64 { delta as f64 / total } else { 1.0 };
        z.iter_mut().for_each(|v| *v *= scale);

        let x = mixed_assignment(n, shift % n, lambda);
        let pos: Vec<f64> = (0..n).map(|i| (0..n).map(|l| (l + 1) as f64 * x[i][l]).sum()).collect();
        let nominal = &nominal[..nominal.len().min(n)];
        prop_assume!(nominal.len() == n);
        let (_, u) = budgeted(nominal.to_vec(), deviation[..n].to_vec(), 1.0);

        // matching row i: Σ a q + Σ_{j≠i} (pos_j − pos_i) z_ij ≥ n + 1 − pos_i
        let zij = |i: usize, j: usize| -> f64 {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            es.iter().position(|&e| e == (a, b)).map_or(0.0, |k| z[k])
        };
        let need: Vec<f64> = (0..n)
            .map(|i| (n + 1) as f64 - pos[i] - (0..n).filter(|&j| j != i).map(|j| (pos[j] - pos[i]) * zij(i, j)).sum::<f64>())
            .collect();
        let mut q: Vec<f64> = (0..u.num_rows()).map(|m| extra[m % extra.len()]).collect();
        for i in 0..n {
            // row i of the set is p_i ≤ p̂_i + p̄_i
            let have: f64 = (0..u.num_rows()).map(|m| u.coeff(m, i) * q[m]).sum();
            if have < need[i] {
                q[i] += need[i] - have;
            }
        }
        let lhs = |i: usize| -> f64 { (0..u.num_rows()).map(|m| u.coeff(m, i) * q[m]).sum() };
        for i in 0..n {
            prop_assert!(lhs(i) - need[i] >= -1e-9);
        }

        let y = matching_to_assignment_map(n, &z, delta).unwrap();
        for i in 0..n {
            prop_assert!((y[i].iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            prop_assert!(((0..n).map(|r| y[r][i]).sum::<f64>() - 1.0).abs() <= 1e-9);
            for j in 0..n {
                prop_assert!(y[i][j] >= -1e-9);
                prop_assert!((y[i][j] - y[j][i]).abs() <= 1e-12);
            }
            // assignment row i: Σ a q ≥ Σ_j (n + 1 − pos_j) y_ij
            let rhs: f64 = (0..n).map(|j| ((n + 1) as f64 - pos[j]) * y[i][j]).sum();
            prop_assert!(lhs(i) - rhs >= -1e-9, "row {}: {} < {}", i, lhs(i), rhs);
        }
        let trace: f64 = (0..n).map(|i| y[i][i]).sum();
        prop_assert!(trace >= n as f64 - 2.0 * delta as f64 - 1e-9);
    }
}
