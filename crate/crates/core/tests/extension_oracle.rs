mod common;

use common::{all_groups, cyclic_subgroups, oracle_witness, subgroup_of, two_generated_subgroups, Table};
use mermin::abgroup::{is_trivial_extension, solve_system, EqSystem, FinAbGroup, Subgroup};
use proptest::prelude::*;

#[test]
fn agrees_with_brute_force_up_to_order_8() {
    let mut pairs = 0;
    for g in all_groups(8) {
        let t = Table::new(&g);
        for (gens, h) in two_generated_subgroups(&t) {
            let sub = Subgroup::new(&g, gens.iter().map(|&i| t.elems[i].clone()).collect()).unwrap();
            let v = is_trivial_extension(&g, &sub).unwrap();
            let oracle = oracle_witness(&t, &h, 2, 3);
            assert_eq!(v.trivial, oracle.is_none(), "G={:?} H={:?} oracle={oracle:?}", g.factors(), h);
            pairs += 1;
        }
    }
    assert!(pairs > 50, "only {pairs} pairs");
}

#[test]
fn witnesses_are_genuine() {
    for g in all_groups(12) {
        let t = Table::new(&g);
        for (gen, h) in cyclic_subgroups(&t) {
            let sub = subgroup_of(&g, &t, gen);
            let Some(w) = is_trivial_extension(&g, &sub).unwrap().witness else {
                continue;
            };
            assert!(w.system.rhs.iter().all(|r| sub.contains(r)));
            assert!(w.system.is_satisfied_by(&g, &w.solution));
            // No assignment from H solves it.
            let hs: Vec<_> = h.iter().map(|&i| t.elems[i].clone()).collect();
            let n = w.system.unknowns();
            let mut idx = vec![0usize; n];
            loop {
                let xs: Vec<_> = idx.iter().map(|&i| hs[i].clone()).collect();
                assert!(!w.system.is_satisfied_by(&g, &xs));
                let mut k = 0;
                while k < n {
                    idx[k] += 1;
                    if idx[k] < hs.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
        }
    }
}

fn small_group() -> impl Strategy<Value = FinAbGroup> {
    prop::collection::vec(2u64..=6, 1..=3).prop_map(|f| FinAbGroup::new(f).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiple_depends_on_gcd_with_exponent(g in small_group(), d in 1i64..40) {
        let whole = Subgroup::whole(&g);
        let e = g.exponent() as i64;
        let gcd = num_integer::gcd(d, e);
        prop_assert!(whole.multiple(d).same_as(&whole.multiple(gcd)));
    }

    #[test]
    fn solvability_is_unimodular_invariant(
        g in small_group(),
        a in prop::collection::vec(-6i64..6, 4),
        b in prop::collection::vec(0i64..30, 6),
        ops in prop::collection::vec((0usize..2, -3i64..=3, any::<bool>()), 0..5),
    ) {
        let rank = g.rank();
        let rhs: Vec<_> = (0..2)
            .map(|r| g.element(&b[r * 3..r * 3 + rank.min(3)].iter().copied().chain(std::iter::repeat(0)).take(rank).collect::<Vec<_>>()).unwrap())
            .collect();
        let mut coeffs = vec![vec![a[0], a[1]], vec![a[2], a[3]]];
        let before = solve_system(&g, &EqSystem::new(coeffs.clone(), rhs.clone()).unwrap(), &Subgroup::whole(&g)).unwrap();
        // Column operations: add a multiple of one column to the other, or swap.
        for (c, k, swap) in ops {
            for row in coeffs.iter_mut() {
                if swap {
                    row.swap(0, 1);
                } else {
                    row[1 - c] += k * row[c];
                }
            }
        }
        let after = solve_system(&g, &EqSystem::new(coeffs, rhs).unwrap(), &Subgroup::whole(&g)).unwrap();
        prop_assert_eq!(before.is_empty(), after.is_empty());
    }

    #[test]
    fn verdict_is_stable_under_generator_choice(g in small_group(), k in 1i64..10, seed in 0usize..1000) {
        let t = Table::new(&g);
        let gen = seed % t.elems.len();
        let h1 = Subgroup::new(&g, vec![t.elems[gen].clone()]).unwrap();
        // k·gen generates the same subgroup whenever k is a unit mod its order.
        let o = g.element_order(&t.elems[gen]) as i64;
        prop_assume!(num_integer::gcd(k, o.max(1)) == 1);
        let h2 = Subgroup::new(&g, vec![g.scale(k, &t.elems[gen])]).unwrap();
        prop_assert_eq!(
            is_trivial_extension(&g, &h1).unwrap().trivial,
            is_trivial_extension(&g, &h2).unwrap().trivial
        );
    }
}
