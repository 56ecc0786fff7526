mod common;

use mermin::phase::{PhasePoint, Turn};
use mermin::qudit::{
    complementarity_report, mermin_outcome_distribution, mermin_outcome_distribution_simplified, phased_x_basis,
    verify_laws, ObservablePair,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn phase(d: usize) -> impl Strategy<Value = PhasePoint> {
    prop::collection::vec((0i64..24, 1i64..=24), d - 1)
        .prop_map(|v| PhasePoint::new(v.into_iter().map(|(n, q)| Turn::new(n, q)).collect()))
}

fn scenario_row() -> impl Strategy<Value = (usize, Vec<PhasePoint>)> {
    (2usize..=3, 1usize..=4).prop_flat_map(|(d, n)| (Just(d), prop::collection::vec(phase(d), n)))
}

/// Phases whose sum is classical: the last one closes the sum onto `g`.
fn classical_sum_row() -> impl Strategy<Value = (usize, Vec<PhasePoint>, u64)> {
    scenario_row().prop_flat_map(|(d, ps)| {
        (0..d as u64).prop_map(move |g| {
            let mut ps = ps.clone();
            let head = PhasePoint::sum(d, ps[..ps.len() - 1].iter());
            *ps.last_mut().unwrap() = PhasePoint::classical(d, g).add(&head.neg());
            (d, ps, g)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn direct_and_simplified_pipelines_agree((d, ps) in scenario_row()) {
        let a = mermin_outcome_distribution(d, ps.len(), &ps).unwrap();
        let b = mermin_outcome_distribution_simplified(d, ps.len(), &ps).unwrap();
        prop_assert!(a.max_abs_diff(&b) < TOL);
    }

    #[test]
    fn matches_amplitude_formula((d, ps) in scenario_row()) {
        let a = mermin_outcome_distribution(d, ps.len(), &ps).unwrap();
        let oracle = common::ghz_x_probabilities(d, &ps);
        for (p, q) in a.probabilities.iter().zip(&oracle) {
            prop_assert!((p - q).abs() < TOL);
        }
        prop_assert!((a.total() - 1.0).abs() < TOL);
    }

    #[test]
    fn parity_law((d, ps, g) in classical_sum_row()) {
        let a = mermin_outcome_distribution(d, ps.len(), &ps).unwrap();
        prop_assert!(a.is_parity_uniform(g as usize, TOL));
    }

    #[test]
    fn x_and_phased_x_overlaps_are_doubly_stochastic(p in phase(3)) {
        let r = complementarity_report(&phased_x_basis(&PhasePoint::zero(3)), &phased_x_basis(&p), TOL).unwrap();
        for i in 0..3 {
            let row: f64 = r.overlaps[i].iter().sum();
            let col: f64 = r.overlaps.iter().map(|o| o[i]).sum();
            prop_assert!((row - 1.0).abs() < TOL && (col - 1.0).abs() < TOL);
        }
    }
}

#[test]
fn canonical_pairs_satisfy_all_laws() {
    for d in 2..=5 {
        let r = verify_laws(&ObservablePair::canonical(d), TOL);
        assert!(r.all_hold(), "D={d}: {r:?}");
        assert!((r.quasi_special_scalar.unwrap() - d as f64).abs() < TOL);
        assert_eq!(r.z.copyables.len(), d);
        assert_eq!(r.x.copyables.len(), d);
    }
}

#[test]
fn corrupted_pair_fails() {
    for d in 2..=5 {
        assert!(!verify_laws(&ObservablePair::with_corrupted_x_comult(d), TOL).all_hold());
    }
}
