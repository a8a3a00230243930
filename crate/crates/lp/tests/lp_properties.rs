#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rrs_lp::*;

/// Random LP over the box [0, 10]^n with up to four mixed rows.
fn arb_lp() -> impl Strategy<Value = LinearProgram> {
    (2usize..=4, 1usize..=4, any::<bool>()).prop_flat_map(|(n, m, maximize)| {
        let coeff = -5i32..=5;
        (
            proptest::collection::vec(coeff.clone(), n),
            proptest::collection::vec((proptest::collection::vec(coeff, n), 0u8..3, -10i32..=20), m),
        )
            .prop_map(move |(obj, rows)| {
                let mut lp = LinearProgram::new(if maximize { Sense::Maximize } else { Sense::Minimize });
                for (j, c) in obj.iter().enumerate() {
                    lp.add_var(format!("v{j}"), 0.0, 10.0, *c as f64);
                }
                for (coeffs, rel, rhs) in rows {
                    let relation = match rel {
                        0 => Relation::Le,
                        1 => Relation::Ge,
                        _ => Relation::Eq,
                    };
                    let coeffs = coeffs.iter().enumerate().map(|(j, &a)| (j, a as f64)).collect();
                    lp.add_constraint(coeffs, relation, rhs as f64);
                }
                lp
            })
    })
}

/// Solves a square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Brute-force optimum over all vertices of a bounded LP (None if infeasible).
fn vertex_oracle(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars();
    // Hyperplanes: rows as equalities plus both box faces per variable.
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in lp.constraints() {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coeffs {
            a[j] += v;
        }
        planes.push((a, row.rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lp.lower()[j]));
        planes.push((e, lp.upper()[j]));
    }
    let mut best: Option<f64> = None;
    let k = planes.len();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if lp.max_violation(&x).1 <= 1e-9 {
                let v = lp.evaluate(&x);
                best = Some(match (best, lp.sense()) {
                    (None, _) => v,
                    (Some(b), Sense::Minimize) => b.min(v),
                    (Some(b), Sense::Maximize) => b.max(v),
                });
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < k - n + i {
                idx[i] += 1;
                for t in i + 1..n {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn simplex_matches_vertex_enumeration(lp in arb_lp()) {
        let sol = solve_lp(&lp, &LpTolerances::default()).unwrap();
        match vertex_oracle(&lp) {
            None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
            Some(best) => {
                prop_assert_eq!(sol.status, LpStatus::Optimal);
                prop_assert!((sol.objective - best).abs() <= 1e-7 * (1.0 + best.abs()),
                    "simplex {} vs oracle {}", sol.objective, best);
                // feasibility certificate
                prop_assert!(lp.max_violation(&sol.x).1 <= 1e-9);
                prop_assert!((lp.evaluate(&sol.x) - sol.objective).abs() <= 1e-9 * (1.0 + best.abs()));
            }
        }
    }

    #[test]
    fn power_of_two_cost_scaling_returns_same_vertex(lp in arb_lp(), k in -4i32..=4) {
        let base = solve_lp(&lp, &LpTolerances::default()).unwrap();
        let mut scaled = lp.clone();
        let lambda = 2f64.powi(k);
        for j in 0..lp.num_vars() {
            scaled.set_objective_coeff(j, lp.objective()[j] * lambda);
        }
        let other = solve_lp(&scaled, &LpTolerances::default()).unwrap();
        prop_assert_eq!(base.status, other.status);
        if base.status == LpStatus::Optimal {
            prop_assert_eq!(&base.x, &other.x);
        }
    }

    #[test]
    fn repeated_solves_are_bitwise_identical(lp in arb_lp()) {
        let a = solve_lp(&lp, &LpTolerances::default()).unwrap();
        let b = solve_lp(&lp, &LpTolerances::default()).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.iterations, b.iterations);
        prop_assert_eq!(a.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn branch_and_bound_matches_enumeration(lp in arb_lp()) {
        let n = lp.num_vars();
        let mut lp = lp;
        for j in 0..n {
            lp.set_bounds(j, 0.0, 1.0);
        }
        let mip = MixedIntegerProgram::new(lp, (0..n).collect()).unwrap();
        let sol = solve_milp(&mip, &SolveConfig::default()).unwrap();
        let mut best: Option<f64> = None;
        for mask in 0..(1u32 << n) {
            let x: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
            if mip.lp.max_violation(&x).1 <= 1e-9 {
                let v = mip.lp.evaluate(&x);
                best = Some(match (best, mip.lp.sense()) {
                    (None, _) => v,
                    (Some(b), Sense::Minimize) => b.min(v),
                    (Some(b), Sense::Maximize) => b.max(v),
                });
            }
        }
        match best {
            None => prop_assert_eq!(sol.status, MilpStatus::Infeasible),
            Some(b) => {
                prop_assert_eq!(sol.status, MilpStatus::Optimal);
                prop_assert!((sol.objective.unwrap() - b).abs() < 1e-7);
                let warm = SolveConfig { warm_start: sol.incumbent.clone(), ..SolveConfig::default() };
                let again = solve_milp(&mip, &warm).unwrap();
                prop_assert_eq!(again.warm_start, Some(WarmStartCheck::Accepted));
                prop_assert!((again.objective.unwrap() - b).abs() < 1e-7);
            }
        }
    }
}

#[test]
fn integral_assignment_relaxation_solves_at_root() {
    // 4x4 assignment with distinct costs: Birkhoff polytope vertices are permutations.
    let n = 4;
    let mut lp = LinearProgram::new(Sense::Minimize);
    let mut vars = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let cost = ((i * 7 + j * 3) % 11) as f64 + 0.1 * (i * n + j) as f64;
            vars[i][j] = lp.add_var(format!("x[{i}][{j}]"), 0.0, 1.0, cost);
        }
    }
    for i in 0..n {
        lp.add_constraint((0..n).map(|j| (vars[i][j], 1.0)).collect(), Relation::Eq, 1.0);
        lp.add_constraint((0..n).map(|j| (vars[j][i], 1.0)).collect(), Relation::Eq, 1.0);
    }
    let mip = MixedIntegerProgram::new(lp, (0..n * n).collect()).unwrap();
    let sol = solve_milp(&mip, &SolveConfig::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Optimal);
    assert_eq!(sol.nodes, 1);
    assert_eq!(sol.log.len(), 1);
    assert!(sol.log_csv().starts_with("time_s,nodes,lb,ub\n"));
}

#[test]
fn zero_time_limit_reports_time_limit() {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let a = lp.add_var("a", 0.0, 1.0, -1.0);
    lp.add_constraint(vec![(a, 1.0)], Relation::Le, 1.0);
    let mip = MixedIntegerProgram::new(lp, vec![a]).unwrap();
    let cfg = SolveConfig { time_limit: std::time::Duration::ZERO, ..SolveConfig::default() };
    let sol = solve_milp(&mip, &cfg).unwrap();
    assert_eq!(sol.status, MilpStatus::TimeLimit);
    assert_eq!(sol.nodes, 0);
}
