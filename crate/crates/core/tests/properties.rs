use proptest::prelude::*;
use rrs_core::heuristics::{run_heuristic, Method, SortingKey};
use rrs_core::oracle::{brute_adv, brute_inc, brute_recoverable, OracleBudget};
use rrs_core::*;
use rrs_lp::SolveConfig;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

fn schedule(n: usize) -> impl Strategy<Value = Schedule> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|p| Schedule::new(p).unwrap())
}

fn times(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..=100, n).prop_map(|v| v.into_iter().map(f64::from).collect())
}

fn schedule_and_times(lo: usize, hi: usize) -> impl Strategy<Value = (Schedule, Vec<f64>)> {
    (lo..=hi).prop_flat_map(|n| (schedule(n), times(n)))
}

fn budgeted_set(lo: usize, hi: usize) -> impl Strategy<Value = (Instance, PolyhedralUncertainty)> {
    (lo..=hi, 0u32..=4).prop_flat_map(|(n, gamma)| {
        (times(n), times(n)).prop_map(move |(a, b)| {
            let inst = Instance::new("p", a, b).unwrap();
            let u = budgeted_to_polyhedral(&inst, BudgetedParams { gamma: f64::from(gamma) }).unwrap();
            (inst, u)
        })
    })
}

/// Unstructured polytope: a box plus a few random packing rows.
fn random_polytope(lo: usize, hi: usize) -> impl Strategy<Value = PolyhedralUncertainty> {
    (lo..=hi).prop_flat_map(|n| {
        (
            prop::collection::vec(1u32..=50, n),
            prop::collection::vec((prop::collection::vec(0u32..=5, n), 1u32..=200), 0..=3),
        )
            .prop_map(move |(caps, rows)| {
                let mut all: Vec<(Vec<f64>, f64)> = (0..n)
                    .map(|i| {
                        let mut a = vec![0.0; n];
                        a[i] = 1.0;
                        (a, f64::from(caps[i]))
                    })
                    .collect();
                all.extend(rows.into_iter().map(|(a, b)| (a.into_iter().map(f64::from).collect(), f64::from(b))));
                PolyhedralUncertainty::from_rows(n, all).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spt_minimizes_cost((x, p) in schedule_and_times(1, 7)) {
        let spt = schedule_cost(&spt_schedule(&p), &p).unwrap();
        prop_assert!(spt <= schedule_cost(&x, &p).unwrap() + 1e-9);
        let recovered = brute_inc(&x, &p, x.n() / 2, &OracleBudget::default()).unwrap();
        prop_assert!(recovered.value >= spt - 1e-9);
    }

    #[test]
    fn swaps_are_at_their_distance((x, _) in schedule_and_times(2, 8), delta in 0usize..=4, pick in any::<u64>()) {
        let all = rrs_core::oracle::recoveries(x.n(), delta);
        let m = &all[(pick % all.len() as u64) as usize];
        let y = apply_swaps(&x, m).unwrap();
        prop_assert_eq!(swap_distance(&x, &y).unwrap(), SwapDistance::Finite(m.len()));
        prop_assert_eq!(swap_distance(&y, &x).unwrap(), SwapDistance::Finite(m.len()));
    }

    #[test]
    fn incremental_lps_match_enumeration((x, p) in schedule_and_times(1, 7), delta in 0usize..=3) {
        let brute = brute_inc(&x, &p, delta, &OracleBudget::default()).unwrap();
        let a = incremental_matching(&x, &p, delta).unwrap();
        let b = incremental_assignment(&x, &p, delta).unwrap();
        prop_assert!(close(a.value, brute.value), "matching {} vs {}", a.value, brute.value);
        prop_assert!(close(b.value, brute.value), "assignment {} vs {}", b.value, brute.value);
        for r in [&a, &b] {
            prop_assert!(r.matching.len() <= delta);
            prop_assert!(close(schedule_cost(&r.second_stage, &p).unwrap(), r.value));
            prop_assert!(r.relaxation.iter().all(|v| v.abs() <= 1e-6 || (v - 1.0).abs() <= 1e-6));
        }
    }

    #[test]
    fn adversary_matches_enumeration(u in random_polytope(2, 6), delta in 0usize..=3, seed in any::<u64>()) {
        let n = u.n();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left((seed % n as u64) as usize);
        let x = Schedule::new(perm).unwrap();
        let lp = adversarial_value(&x, &u, delta).unwrap();
        let brute = brute_adv(&x, &u, delta, &OracleBudget::default()).unwrap();
        prop_assert!(close(lp.value, brute.value), "{} vs {}", lp.value, brute.value);
        prop_assert!(u.contains(&lp.worst_scenario, 1e-6).unwrap());
        let inc = brute_inc(&x, &lp.worst_scenario, delta, &OracleBudget::default()).unwrap();
        prop_assert!(close(inc.value, lp.value), "Inc at the worst case {} vs {}", inc.value, lp.value);
    }

    #[test]
    fn budget_sets_grow_with_gamma((inst, _) in budgeted_set(1, 6), gamma in 0u32..5) {
        let small = budgeted_to_polyhedral(&inst, BudgetedParams { gamma: f64::from(gamma) }).unwrap();
        let large = budgeted_to_polyhedral(&inst, BudgetedParams { gamma: f64::from(gamma + 1) }).unwrap();
        let x = spt_schedule(inst.nominal());
        let a = adversarial_value(&x, &small, 1).unwrap().value;
        let b = adversarial_value(&x, &large, 1).unwrap().value;
        prop_assert!(b >= a - 1e-6 * a.abs().max(1.0));
        prop_assert!(small.contains(inst.nominal(), 1e-9).unwrap());
        prop_assert_eq!(small.validate_compact().unwrap(), Compactness::Ok);
    }

    #[test]
    fn instance_json_and_csv_round_trip((inst, u) in budgeted_set(1, 6)) {
        let back = Instance::from_json(&inst.to_json()).unwrap();
        prop_assert_eq!(&back, &inst);
        let csv = Instance::from_csv(inst.id.clone(), inst.to_csv().as_bytes()).unwrap();
        prop_assert_eq!(csv.nominal(), inst.nominal());
        prop_assert_eq!(csv.deviation(), inst.deviation());
        prop_assert_eq!(PolyhedralUncertainty::from_json(&u.to_json()).unwrap(), u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn heuristics_bound_the_optimum((inst, u) in budgeted_set(2, 5), delta in 0usize..=2) {
        let (best, _) = brute_recoverable(&u, delta, &OracleBudget::default()).unwrap();
        for method in Method::ALL {
            let h = run_heuristic(method, &inst, &u, delta, SortingKey::default(), &SolveConfig::default()).unwrap();
            prop_assert!(h.value >= best - 1e-6 * best.abs().max(1.0), "{} {} below {}", method, h.value, best);
            prop_assert!(close(adversarial_value(&h.schedule, &u, delta).unwrap().value, h.value));
        }
    }

    #[test]
    fn recovery_never_hurts((_, u) in budgeted_set(2, 5)) {
        let mut last = f64::INFINITY;
        for delta in 0..=3 {
            let (v, _) = brute_recoverable(&u, delta, &OracleBudget::default()).unwrap();
            prop_assert!(v <= last + 1e-6 * v.abs().max(1.0));
            last = v;
        }
    }
}
