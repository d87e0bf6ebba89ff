//! Cross-module properties: operator linearity, serialization round-trips,
//! construction invariants, rule-order independence and ground-truth
//! consistency of the peeling loop.

use proptest::prelude::*;
use rand::Rng;

use verisparse::decoder::{DecodeOutcome, DecoderState, DEFAULT_EPS_EQ, DEFAULT_EPS_ZERO};
use verisparse::graph::MeasurementGraph;
use verisparse::seed::trial_rng;
use verisparse::signal::{generate_gaussian_sparse, measure, SparseSignal};

fn arb_graph() -> impl Strategy<Value = MeasurementGraph> {
    (1usize..12, 1usize..8).prop_flat_map(|(n, m)| {
        proptest::collection::vec(
            proptest::collection::btree_set(0..m as u32, 0..=m.min(3)),
            n,
        )
        .prop_map(move |lists| {
            let lists: Vec<Vec<u32>> = lists.into_iter().map(|s| s.into_iter().collect()).collect();
            MeasurementGraph::from_var_lists(n, m, &lists).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn measure_is_linear(
        (g, e1, e2, a) in arb_graph().prop_flat_map(|g| {
            let n = g.n_vars();
            (
                Just(g),
                proptest::collection::vec(-3.0f64..3.0, n),
                proptest::collection::vec(-3.0f64..3.0, n),
                -3.0f64..3.0,
            )
        })
    ) {
        let combined: Vec<f64> = e1.iter().zip(&e2).map(|(x, y)| a * x + y).collect();
        let lhs = measure(&g, &SparseSignal::from_dense(&combined)).unwrap();
        let s1 = measure(&g, &SparseSignal::from_dense(&e1)).unwrap();
        let s2 = measure(&g, &SparseSignal::from_dense(&e2)).unwrap();
        for m in 0..g.n_checks() {
            let rhs = a * s1.as_slice()[m] + s2.as_slice()[m];
            prop_assert!((lhs.as_slice()[m] - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn alist_round_trip_is_identity(g in arb_graph()) {
        let back = MeasurementGraph::from_alist(&g.to_alist()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn regular_construction_invariants(
        (n, m, deg, seed) in (4usize..24, 1usize..4, 0u64..1000).prop_flat_map(|(m_half, deg, seed)| {
            let m = 2 * m_half;
            let cap = if deg >= 2 {
                (m * (m - 1) / 2) / (deg * (deg - 1))
            } else {
                60
            };
            (1usize..=cap.max(1), Just(m), Just(deg.min(m)), Just(seed))
        })
    ) {
        let deg = deg.max(1);
        let g = MeasurementGraph::build_regular(n, m, deg, seed, 64).unwrap();
        prop_assert!(g.girth_at_least_six());
        for v in 0..n {
            prop_assert_eq!(g.var_degree(v).unwrap(), deg);
        }
        let var_sum: usize = (0..n).map(|v| g.var_degree(v).unwrap()).sum();
        let check_sum: usize = (0..m).map(|c| g.check_degree(c).unwrap()).sum();
        prop_assert_eq!(var_sum, check_sum);
        prop_assert_eq!(g, MeasurementGraph::build_regular(n, m, deg, seed, 64).unwrap());
    }
}

/// Small random instance for the seeded loop tests; dimensions stay inside
/// the feasible range of the 4-cycle-free constructor.
fn seeded_instance(seed: u64) -> (MeasurementGraph, SparseSignal) {
    let mut rng = trial_rng(0x5eed, seed);
    let n = rng.random_range(8..=64usize);
    let deg = rng.random_range(2..=3usize);
    // keep the pair fill under ~50% so greedy placement cannot get stuck
    let min_m = match deg {
        2 => ((4 * n) as f64).sqrt().ceil() as usize + 2,
        _ => ((12 * n) as f64).sqrt().ceil() as usize + 2,
    };
    let m = rng.random_range(min_m..=min_m + 8);
    let g = MeasurementGraph::build_regular(n, m, deg, rng.random::<u64>(), 64).unwrap();
    let k = rng.random_range(0..=n / 3);
    let e = generate_gaussian_sparse(n, k, &mut rng).unwrap();
    (g, e)
}

/// The loop outcome must not depend on whether the equal-pair rule runs
/// before or after the degree-one rule.
#[test]
fn rule_order_does_not_change_outcome() {
    for seed in 0..1000u64 {
        let (g, e) = seeded_instance(seed);
        let s = measure(&g, &e).unwrap();

        let mut standard = DecoderState::init(&g, &s, DEFAULT_EPS_ZERO, DEFAULT_EPS_EQ).unwrap();
        let report = standard.run_to_convergence(g.n_vars() + 1);

        let mut swapped = DecoderState::init(&g, &s, DEFAULT_EPS_ZERO, DEFAULT_EPS_EQ).unwrap();
        let mut rounds = 0;
        let swapped_success = loop {
            swapped.apply_zero_rule();
            swapped.apply_equal_pair_rule();
            swapped.apply_degree_one_rule();
            let verified = swapped.peel_pending().unwrap();
            rounds += 1;
            if swapped.unidentified_count() == 0 {
                break true;
            }
            if verified == 0 || rounds > g.n_vars() + 1 {
                break false;
            }
        };

        assert_eq!(
            report.outcome == DecodeOutcome::Success,
            swapped_success,
            "seed {seed}: rule order changed the outcome"
        );
        assert_eq!(
            report.unidentified_count,
            swapped.unidentified_count(),
            "seed {seed}: rule order changed the residual set"
        );
    }
}

/// While all identifications are correct, every check's residual equals the
/// sum of its still-unidentified true values.
#[test]
fn residuals_track_ground_truth() {
    for seed in 0..200u64 {
        let (g, e) = seeded_instance(seed);
        let s = measure(&g, &e).unwrap();
        let mut st = DecoderState::init(&g, &s, DEFAULT_EPS_ZERO, DEFAULT_EPS_EQ).unwrap();
        for _ in 0..g.n_vars() {
            let verified = st.run_iteration();
            for m in 0..g.n_checks() {
                let neighbors = g.check_neighbors(m).unwrap();
                let expected: f64 = neighbors
                    .iter()
                    .filter(|&&n| !st.is_identified(n as usize))
                    .map(|&n| e.value_at(n as usize))
                    .sum();
                let scale: f64 = neighbors
                    .iter()
                    .map(|&n| e.value_at(n as usize).abs())
                    .sum();
                let err = (st.residual()[m] - expected).abs();
                assert!(
                    err <= 1e-9 * (1.0 + scale),
                    "seed {seed}: check {m} residual off by {err}"
                );
            }
            if verified == 0 || st.unidentified_count() == 0 {
                break;
            }
        }
        assert_eq!(
            st.conflict_count(),
            0,
            "seed {seed}: conflicting verification"
        );
        if st.unidentified_count() == 0 {
            let recovered = st.extract_signal().unwrap();
            assert!(
                recovered.max_abs_diff(&e) <= 1e-9,
                "seed {seed}: recovered signal off"
            );
        }
    }
}
