mod common;

use std::collections::BTreeSet;

use common::Table;
use mermin::abgroup::{FinAbGroup, GroupElement};
use mermin::frel::{build_sc_pair, frel_locality_check, rel_phases, verify_rel_laws};

fn small_groups() -> Vec<FinAbGroup> {
    [vec![1], vec![2], vec![3], vec![4], vec![2, 2]]
        .into_iter()
        .map(|f| FinAbGroup::new(f).unwrap())
        .collect()
}

/// Phases and classical points straight from the group tables: `S` is a phase
/// when `{(g' - g, h) : (g,h), (g',h) ∈ S}` is exactly `{(0,h)}`, and classical
/// when `{((g,h1),(g,h2)) : (g, h1+h2) ∈ S} = S × S`.
fn oracle(tg: &Table, th: &Table) -> (BTreeSet<Vec<GroupElement>>, BTreeSet<Vec<GroupElement>>) {
    let (ng, nh) = (tg.elems.len(), th.elems.len());
    let neg = |i: usize| (0..ng).find(|&j| tg.add[i][j] == 0).unwrap();
    let mut phases = BTreeSet::new();
    let mut classical = BTreeSet::new();
    for mask in 1u64..(1 << (ng * nh)) {
        let s: Vec<(usize, usize)> = (0..ng * nh).filter(|&i| mask >> i & 1 == 1).map(|i| (i / nh, i % nh)).collect();
        let diffs: BTreeSet<(usize, usize)> = s
            .iter()
            .flat_map(|&(g1, h1)| s.iter().filter(move |&&(_, h2)| h2 == h1).map(move |&(g2, h)| (tg.add[g2][neg(g1)], h)))
            .collect();
        if diffs == (0..nh).map(|h| (0, h)).collect() {
            let mut v = vec![tg.elems[0].clone(); nh];
            for &(g, h) in &s {
                v[h] = tg.elems[g].clone();
            }
            phases.insert(v);
        }
        let pairs: BTreeSet<_> = (0..ng)
            .flat_map(|g| (0..nh).flat_map(move |h1| (0..nh).map(move |h2| (g, h1, h2))))
            .filter(|&(g, h1, h2)| s.contains(&(g, th.add[h1][h2])))
            .map(|(g, h1, h2)| ((g, h1), (g, h2)))
            .collect();
        let square: BTreeSet<_> = s.iter().flat_map(|&a| s.iter().map(move |&b| (a, b))).collect();
        if pairs == square {
            assert_eq!(s.len(), nh, "classical subset misses part of H");
            classical.insert(s.iter().map(|&(g, _)| tg.elems[g].clone()).collect::<BTreeSet<_>>());
        }
    }
    // Each classical point is a single element of G spread over all of H.
    let classical = classical
        .into_iter()
        .map(|c| {
            assert_eq!(c.len(), 1, "classical subset spans several G values");
            vec![c.into_iter().next().unwrap(); nh]
        })
        .collect();
    (phases, classical)
}

#[test]
fn laws_hold_for_all_small_pairs() {
    for g in small_groups() {
        for h in small_groups() {
            let pair = build_sc_pair(&g, &h).unwrap();
            let r = verify_rel_laws(&pair);
            assert!(r.all_hold(), "{r:?}");
            assert!(r.z.commutative_ok && r.x.commutative_ok);
        }
    }
}

#[test]
fn phases_match_table_oracle() {
    for g in small_groups() {
        for h in small_groups() {
            let pair = build_sc_pair(&g, &h).unwrap();
            let p = rel_phases(&pair).unwrap();
            let (phases, classical) = oracle(&Table::new(&g), &Table::new(&h));
            let got: BTreeSet<_> = p.phases.iter().cloned().collect();
            assert_eq!(got, phases, "G={:?} H={:?}", g.factors(), h.factors());
            assert_eq!(p.phases.len() as u128, g.order().pow(h.order() as u32));
            assert_eq!(p.classical.len() as u128, g.order());
            let got: BTreeSet<_> = p.classical.iter().cloned().collect();
            assert_eq!(got, classical);
            assert!(p.is_closed());
        }
    }
}

#[test]
fn locality_is_trivial_for_all_small_pairs() {
    for g in small_groups() {
        for h in small_groups() {
            let v = frel_locality_check(&g, &h).unwrap();
            assert!(v.trivial && v.witness.is_none(), "G={:?} H={:?}", g.factors(), h.factors());
        }
    }
}

#[test]
fn negative_controls_fail() {
    for g in small_groups() {
        for h in small_groups() {
            let pair = build_sc_pair(&g, &h).unwrap();
            if pair.carrier() > 1 {
                assert!(!verify_rel_laws(&pair.clone().with_corrupted_x_comult()).all_hold());
                assert!(!verify_rel_laws(&pair.degenerate()).coherence_ok);
            }
        }
    }
}
