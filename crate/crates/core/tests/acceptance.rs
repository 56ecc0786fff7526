//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p mermin-core --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use mermin::abgroup::{is_trivial_extension, FinAbGroup, Subgroup};
use mermin::frel::{build_sc_pair, frel_locality_check, verify_rel_laws};
use mermin::lhv::{
    build_trivial_lhv, identity_solution, lhv_exists, quantum_table, Certificate, Contexts, Existence, LhvMode,
    LhvModel, DEFAULT_SEARCH_BOUND,
};
use mermin::phase::PhasePoint;
use mermin::qss::{
    audit_device_independent, run_protocol, simulate_device_independent_attack, simulate_pre_phase_attack,
    AttackModel, DetectionVerdict, QssConfig,
};
use mermin::qudit::{
    complementarity_report, mermin_outcome_distribution, phased_x_basis, verify_laws, ObservablePair,
};
use mermin::scenario::{
    count_effective_pairs, newcond, pair_count_series, scan_newcond, MerminScenario, VariationPolicy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXACT_TOL: f64 = 1e-9;
const TV_LIMIT: f64 = 0.05;
const FORMULA_BAND: f64 = 0.02;
const ORACLE_BUDGET: Duration = Duration::from_secs(5 * 60);
const CLASSIC_BUDGET: Duration = Duration::from_secs(1);
const PAIRS_BUDGET: Duration = Duration::from_secs(10 * 60);
const GRID_BOUND: u128 = 1 << 24;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        // Negated so that NaN fails.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn small_groups() -> Vec<FinAbGroup> {
    [vec![1], vec![2], vec![3], vec![4], vec![2, 2]]
        .into_iter()
        .map(|f| FinAbGroup::new(f).unwrap())
        .collect()
}

fn quarter(d: usize) -> PhasePoint {
    PhasePoint::parse(&vec!["1/4"; d - 1].join(","), d).unwrap()
}

fn extension_oracle() -> Check {
    let start = Instant::now();
    let (mut pairs, mut nontrivial) = (0, 0);
    for g in common::all_groups(16) {
        let t = common::Table::new(&g);
        for (gen, h) in common::cyclic_subgroups(&t) {
            let sub = common::subgroup_of(&g, &t, gen);
            let v = is_trivial_extension(&g, &sub).map_err(|e| e.to_string())?;
            let oracle = common::oracle_witness(&t, &h, 2, 3);
            ensure!(
                v.trivial == oracle.is_none(),
                "G={:?} H=<{:?}>: decision {} but oracle {:?}",
                g.factors(),
                t.elems[gen],
                v.trivial,
                oracle
            );
            pairs += 1;
            nontrivial += usize::from(!v.trivial);
        }
    }
    let took = start.elapsed();
    ensure!(took < ORACLE_BUDGET, "took {took:?}");
    Ok(format!("{pairs} pairs, {nontrivial} non-trivial, 0 disagreements, {took:.1?}"))
}

fn reference_verdicts() -> Check {
    let z4 = FinAbGroup::new(vec![4]).unwrap();
    let v = is_trivial_extension(&z4, &Subgroup::new(&z4, vec![z4.element(&[2]).unwrap()]).unwrap()).unwrap();
    let w = v.witness.as_ref().map(|w| w.system.to_string());
    ensure!(!v.trivial && w.as_deref() == Some("2x=2"), "Z4 ⊇ {{0,2}}: {v:?}");
    for d in [2u64, 3] {
        let g = FinAbGroup::new(vec![d, d]).unwrap();
        let h = Subgroup::new(&g, vec![g.element(&[1, 0]).unwrap()]).unwrap();
        ensure!(is_trivial_extension(&g, &h).unwrap().trivial, "Z{d}×Z{d} ⊇ Z{d}×0 not trivial");
    }
    for g in small_groups() {
        for h in small_groups() {
            let v = frel_locality_check(&g, &h).unwrap();
            ensure!(v.trivial, "FRel G={:?} H={:?} non-trivial", g.factors(), h.factors());
        }
    }
    Ok("Z4 witness 2x=2; Z2², Z3² trivial; 25 FRel pairs trivial".into())
}

fn classic_mermin() -> Check {
    let start = Instant::now();
    let t = quantum_table(&MerminScenario::classic_322(), EXACT_TOL).unwrap();
    let v = lhv_exists(&t, LhvMode::ParityOnly, DEFAULT_SEARCH_BOUND).unwrap();
    let took = start.elapsed();
    for (s, row) in t.rows.iter().enumerate() {
        let parity = usize::from(s > 0);
        ensure!(row.support.len() == 4, "row {s} support {:?}", row.support);
        ensure!(
            row.support.iter().all(|x| x.iter().sum::<usize>() % 2 == parity),
            "row {s} parity"
        );
        for p in row.probs.as_ref().unwrap().values() {
            ensure!((p - 0.25).abs() <= EXACT_TOL, "row {s} probability {p}");
        }
    }
    ensure!(v.existence == Existence::Refuted, "{v:?}");
    match &v.certificate {
        Some(Certificate::Parity { modulus: 2, rhs, .. }) if rhs.rem_euclid(2) == 1 => {}
        other => return Err(format!("certificate {other:?}")),
    }
    ensure!(took < CLASSIC_BUDGET, "took {took:?}");
    Ok(format!("supports 4×4 at 0.25, refuted by 0≡1 (mod 2), {took:.1?}"))
}

fn classical_construction() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let d = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=4);
        let rows = rng.gen_range(1..=4);
        let s = MerminScenario::new(
            d,
            (0..rows)
                .map(|_| (0..n).map(|_| PhasePoint::classical(d, rng.gen_range(0..d as u64))).collect())
                .collect(),
        )
        .unwrap();
        let model: LhvModel = build_trivial_lhv(&s, &identity_solution(&s).unwrap(), 1 << 20).unwrap();
        let ctx = Contexts::of_scenario(&s);
        for (r, row) in s.rows.iter().enumerate() {
            let q = mermin_outcome_distribution(d, n, row).unwrap();
            let m = model.row_distribution(&ctx.rows[r]);
            let diff = q.max_abs_diff(&m);
            worst = worst.max(diff);
            ensure!(diff <= EXACT_TOL, "case {case} row {r}: diff {diff}");
        }
        let t = quantum_table(&s, EXACT_TOL).unwrap();
        let v = lhv_exists(&t, LhvMode::Possibilistic, DEFAULT_SEARCH_BOUND).unwrap();
        ensure!(v.existence == Existence::Exists, "case {case}: {v:?}");
    }
    Ok(format!("20 scenarios, worst deviation {worst:.1e}"))
}

fn newcond_cases() -> Check {
    let sols = scan_newcond(2, 3, 2, 360, EXACT_TOL, GRID_BOUND).unwrap();
    ensure!(sols == vec![quarter(2)], "q=360 solutions {sols:?}");
    let r = newcond(2, 3, 2, &sols[0], EXACT_TOL);
    ensure!(r.effective && r.residual_norm < EXACT_TOL, "{r:?}");
    let b = PhasePoint::parse("1/9,-1/9", 3).unwrap();
    let r = newcond(3, 10, 3, &b, EXACT_TOL);
    ensure!(r.effective && r.residual_norm < EXACT_TOL, "{r:?}");
    let c = complementarity_report(&phased_x_basis(&PhasePoint::zero(3)), &phased_x_basis(&b), EXACT_TOL).unwrap();
    ensure!(!c.mutually_unbiased, "(1/9,8/9) reported unbiased");
    Ok(format!("unique 1/4 at q=360; (1/9,8/9) effective, non-MUB, residual {:.1e}", r.residual_norm))
}

fn pair_counts() -> Check {
    let start = Instant::now();
    let one = count_effective_pairs(3, 2, 4, VariationPolicy::Canonical, EXACT_TOL, GRID_BOUND).unwrap();
    ensure!(one.count == 1, "(3,2,4) count {}", one.count);
    let series = |d: usize, ns: std::ops::RangeInclusive<usize>, q: usize| {
        pair_count_series(ns, d, q, VariationPolicy::Canonical, EXACT_TOL, GRID_BOUND).unwrap()
    };
    let (a, csv2) = series(2, 3..=11, 36);
    let (b, csv2_again) = series(2, 3..=11, 36);
    ensure!(a == b && csv2 == csv2_again, "D=2 series not deterministic");
    let (c3, csv3) = series(3, 4..=10, 36);
    ensure!(csv2.lines().count() == 10 && csv3.lines().count() == 8, "CSV row counts");
    // Refinement chains q | q'.
    for (d, ns, chain) in [(2, 3..=11, vec![2, 4, 12, 36]), (3, 4..=10, vec![3, 6, 18, 36])] {
        let mut prev: Option<Vec<usize>> = None;
        for q in chain {
            let counts: Vec<usize> = series(d, ns.clone(), q).0.iter().map(|c| c.count).collect();
            if let Some(p) = &prev {
                ensure!(p.iter().zip(&counts).all(|(x, y)| x <= y), "D={d} q={q}: {p:?} -> {counts:?}");
            }
            prev = Some(counts);
        }
    }
    let took = start.elapsed();
    ensure!(took < PAIRS_BUDGET, "took {took:?}");
    let d3: Vec<usize> = c3.iter().map(|c| c.count).collect();
    Ok(format!("(3,2,4)=1, D=3 counts {d3:?}, {took:.1?}"))
}

fn law_suite() -> Check {
    for d in 2..=5 {
        let r = verify_laws(&ObservablePair::canonical(d), EXACT_TOL);
        ensure!(r.all_hold(), "D={d}: {r:?}");
        let n = r.quasi_special_scalar.unwrap_or(f64::NAN);
        ensure!((n - d as f64).abs() < EXACT_TOL, "D={d}: scalar {n}");
        ensure!(!verify_laws(&ObservablePair::with_corrupted_x_comult(d), EXACT_TOL).all_hold(), "D={d} control passed");
    }
    let mut pairs = 0;
    for g in small_groups() {
        for h in small_groups() {
            let pair = build_sc_pair(&g, &h).unwrap();
            ensure!(verify_rel_laws(&pair).all_hold(), "G={:?} H={:?}", g.factors(), h.factors());
            if pair.carrier() > 1 {
                ensure!(!verify_rel_laws(&pair.clone().with_corrupted_x_comult()).all_hold(), "corrupted control passed");
                ensure!(!verify_rel_laws(&pair.degenerate()).all_hold(), "degenerate control passed");
            }
            pairs += 1;
        }
    }
    Ok(format!("qudit D=2..5 with scalar D, {pairs} relational pairs, controls fail"))
}

fn every_table(counts: &[usize], d: usize) -> LhvModel {
    let total: usize = counts.iter().sum();
    let tables = (0..d.pow(total as u32))
        .map(|mut code| {
            counts
                .iter()
                .map(|&k| {
                    (0..k)
                        .map(|_| {
                            let o = (code % d) as u64;
                            code /= d;
                            o
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    LhvModel::uniform(d, counts.to_vec(), tables)
}

fn secret_sharing() -> Check {
    let xy = vec![PhasePoint::zero(2), quarter(2)];
    let honest = run_protocol(&QssConfig::shared(3, 2, xy.clone(), 2024, 10_000), None, &AttackModel::None).unwrap();
    ensure!(honest.summary.accuracy == 1.0, "accuracy {}", honest.summary.accuracy);

    let w = run_protocol(&QssConfig::shared(3, 2, xy.clone(), 2025, 10_000), None, &AttackModel::Withhold { player: 2 })
        .unwrap();
    ensure!(w.summary.tv_distance < TV_LIMIT, "withhold TV {}", w.summary.tv_distance);

    let pre = simulate_pre_phase_attack(&QssConfig::shared(3, 2, xy.clone(), 2026, 100_000), EXACT_TOL).unwrap();
    let expected = pre.expected_failure.ok_or("formula not applicable")?;
    let gap = (pre.summary.failure_rate - expected).abs();
    ensure!(gap <= FORMULA_BAND, "pre-phase {} vs {expected}", pre.summary.failure_rate);

    let cfg = QssConfig::shared(3, 2, xy, 2027, 20_000);
    let audit = audit_device_independent(&cfg, 1 << 20).unwrap();
    ensure!(audit.secure() && audit.undetectable_tables == 0, "{{0,π/2}} audit {audit:?}");
    let counts: Vec<usize> = cfg.alphabet.iter().map(Vec::len).collect();
    let r = simulate_device_independent_attack(&cfg, &every_table(&counts, 2)).unwrap();
    ensure!(r.verdict == DetectionVerdict::Detected, "{{0,π/2}} attack {r:?}");

    let classical = vec![PhasePoint::zero(2), PhasePoint::classical(2, 1)];
    let cfg = QssConfig::shared(3, 2, classical, 2028, 100_000);
    let audit = audit_device_independent(&cfg, 1 << 20).unwrap();
    let mimic = audit.mimic.as_ref().ok_or("no mimicking model for classical alphabet")?;
    let r = simulate_device_independent_attack(&cfg, mimic).unwrap();
    ensure!(r.verdict == DetectionVerdict::Undetected, "classical attack {r:?}");
    Ok(format!(
        "accuracy 1, withhold TV {:.4}, pre-phase {:.4} vs {expected:.4}, DI detected / undetected (pooled TV {:.4})",
        w.summary.tv_distance, pre.summary.failure_rate, r.pooled_tv
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("extension decision agrees with brute-force oracle", extension_oracle),
        ("reference verdicts", reference_verdicts),
        ("classic (3,2,2) Mermin scenario", classic_mermin),
        ("local model for all-classical scenarios", classical_construction),
        ("two-measurement effectiveness condition", newcond_cases),
        ("effective pair counts", pair_counts),
        ("Frobenius / bialgebra law suite", law_suite),
        ("secret sharing", secret_sharing),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
