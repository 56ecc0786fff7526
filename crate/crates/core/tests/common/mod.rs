//! Brute-force oracles shared by the integration tests. Nothing here uses the
//! library's integer linear algebra.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::f64::consts::TAU;

use mermin::abgroup::{FinAbGroup, GroupElement, Subgroup};
use mermin::phase::PhasePoint;
use num_complex::Complex64;

/// Every factor multiset (factors ≥ 2, non-decreasing) with product at most
/// `max_order`, plus the trivial group.
pub fn all_groups(max_order: u64) -> Vec<FinAbGroup> {
    fn go(min: u64, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        for f in min..=left {
            cur.push(f);
            out.push(cur.clone());
            go(f, left / f, cur, out);
            cur.pop();
        }
    }
    let mut lists = vec![vec![1]];
    go(2, max_order, &mut Vec::new(), &mut lists);
    lists.into_iter().map(|f| FinAbGroup::new(f).unwrap()).collect()
}

/// Plain table model of a group: elements by index, addition and scaling.
pub struct Table {
    pub elems: Vec<GroupElement>,
    pub add: Vec<Vec<usize>>,
    pub exp: u64,
}

impl Table {
    pub fn new(g: &FinAbGroup) -> Self {
        let elems = g.enumerate(1 << 20).unwrap();
        let n = elems.len();
        let idx = |e: &GroupElement| elems.iter().position(|x| x == e).unwrap();
        let mut add = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let s: Vec<u64> = elems[i]
                    .coords()
                    .iter()
                    .zip(elems[j].coords())
                    .zip(g.factors())
                    .map(|((a, b), d)| (a + b) % d)
                    .collect();
                add[i][j] = idx(&g.element(&s.iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap());
            }
        }
        let exp = g.factors().iter().fold(1u64, |a, &b| num_integer::lcm(a, b));
        Table { elems, add, exp }
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn scale(&self, c: u64, i: usize) -> usize {
        let mut acc = 0;
        for _ in 0..c {
            acc = self.add[acc][i];
        }
        acc
    }
}

/// The cyclic subgroups of `g`, each once, as element-index sets.
pub fn cyclic_subgroups(t: &Table) -> Vec<(usize, BTreeSet<usize>)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for gen in 0..t.elems.len() {
        let mut set = BTreeSet::new();
        let mut cur = 0;
        loop {
            set.insert(cur);
            cur = t.add[cur][gen];
            if cur == 0 {
                break;
            }
        }
        if seen.insert(set.clone()) {
            out.push((gen, set));
        }
    }
    out
}

/// Subgroups generated by at most two elements, each once, with their
/// generators.
pub fn two_generated_subgroups(t: &Table) -> Vec<(Vec<usize>, BTreeSet<usize>)> {
    let n = t.elems.len();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut set = BTreeSet::from([0]);
            loop {
                let grown: BTreeSet<usize> = set.iter().flat_map(|&x| [x, t.add[x][a], t.add[x][b]]).collect();
                if grown == set {
                    break;
                }
                set = grown;
            }
            if seen.insert(set.clone()) {
                out.push((vec![a, b], set));
            }
        }
    }
    out
}

/// Sum of two subsets of `G^m`, elements encoded in base `|G|`.
fn sumset(t: &Table, m: usize, a: &[bool], b: &[bool]) -> Vec<bool> {
    let n = t.elems.len();
    let size = a.len();
    let mut out = vec![false; size];
    let split = |mut x: usize| {
        let mut v = vec![0; m];
        for slot in v.iter_mut().rev() {
            *slot = x % n;
            x /= n;
        }
        v
    };
    let a_idx: Vec<usize> = (0..size).filter(|&i| a[i]).collect();
    let b_idx: Vec<Vec<usize>> = (0..size).filter(|&i| b[i]).map(split).collect();
    for &i in &a_idx {
        let va = split(i);
        for vb in &b_idx {
            let s = va.iter().zip(vb).fold(0, |acc, (&x, &y)| acc * n + t.add[x][y]);
            out[s] = true;
        }
    }
    out
}

/// `{(c_1 x, ..., c_m x) : x ∈ dom}` as a subset of `G^m`.
fn column_image(t: &Table, col: &[u64], dom: &BTreeSet<usize>) -> Vec<bool> {
    let n = t.elems.len();
    let mut out = vec![false; n.pow(col.len() as u32)];
    for &x in dom {
        let idx = col.iter().fold(0, |acc, &c| acc * n + t.scale(c, x));
        out[idx] = true;
    }
    out
}

/// Searches systems with at most `max_eq` equations and `max_unknowns`
/// unknowns (coefficients taken mod `exp(G)`) for one whose right-hand side
/// lies in `H^m`, is reachable from `G^n`, but not from `H^n`. Returns the
/// coefficient columns of such a system.
pub fn oracle_witness(
    t: &Table,
    h: &BTreeSet<usize>,
    max_eq: usize,
    max_unknowns: usize,
) -> Option<Vec<Vec<u64>>> {
    let n = t.elems.len();
    let all: BTreeSet<usize> = (0..n).collect();
    for m in 1..=max_eq {
        let size = n.pow(m as u32);
        let in_h: Vec<bool> = (0..size)
            .map(|mut x| {
                (0..m).all(|_| {
                    let c = x % n;
                    x /= n;
                    h.contains(&c)
                })
            })
            .collect();
        // Column classes, deduplicated by their pair of images.
        let mut classes: Vec<(Vec<u64>, Vec<bool>, Vec<bool>)> = Vec::new();
        let mut seen = HashSet::new();
        let cols = (t.exp as usize).pow(m as u32);
        for code in 0..cols {
            let mut col = vec![0u64; m];
            let mut r = code;
            for slot in col.iter_mut().rev() {
                *slot = (r % t.exp as usize) as u64;
                r /= t.exp as usize;
            }
            let ig = column_image(t, &col, &all);
            let ih = column_image(t, &col, h);
            if seen.insert((ig.clone(), ih.clone())) {
                classes.push((col, ig, ih));
            }
        }
        let mut zero = vec![false; size];
        zero[0] = true;
        let mut frontier = vec![(Vec::<Vec<u64>>::new(), zero.clone(), zero)];
        let mut states = HashSet::new();
        for _ in 0..max_unknowns {
            let mut next = Vec::new();
            for (cols, sg, sh) in &frontier {
                for (col, cg, ch) in &classes {
                    let ng = sumset(t, m, sg, cg);
                    let nh = sumset(t, m, sh, ch);
                    if !states.insert((ng.clone(), nh.clone())) {
                        continue;
                    }
                    let mut cs = cols.clone();
                    cs.push(col.clone());
                    if (0..size).any(|x| ng[x] && in_h[x] && !nh[x]) {
                        return Some(cs);
                    }
                    next.push((cs, ng, nh));
                }
            }
            frontier = next;
        }
    }
    None
}

pub fn subgroup_of(g: &FinAbGroup, t: &Table, gen: usize) -> Subgroup {
    Subgroup::new(g, vec![t.elems[gen].clone()]).unwrap()
}

/// Outcome probabilities straight from the amplitude formula
/// `⟨x_k| ⊗ P_α |GHZ⟩ = D^{-(N+1)/2} Σ_j Π_i e^{2πi α_i(j)} ω^{-j k_i}`.
pub fn ghz_x_probabilities(d: usize, phases: &[PhasePoint]) -> Vec<f64> {
    let n = phases.len();
    let angle = |p: &PhasePoint, j: usize| -> f64 {
        if j == 0 {
            0.0
        } else {
            let t = p.turns()[j - 1];
            *t.numer() as f64 / *t.denom() as f64
        }
    };
    let norm = (d as f64).powf(-((n + 1) as f64) / 2.0);
    (0..d.pow(n as u32))
        .map(|mut idx| {
            let mut k = vec![0; n];
            for slot in k.iter_mut().rev() {
                *slot = idx % d;
                idx /= d;
            }
            let amp: Complex64 = (0..d)
                .map(|j| {
                    let turns: f64 = phases.iter().zip(&k).map(|(p, &ki)| angle(p, j) - (j * ki) as f64 / d as f64).sum();
                    Complex64::from_polar(1.0, TAU * turns)
                })
                .sum();
            (amp * norm).norm_sqr()
        })
        .collect()
}

/// Exhaustive local-model search: does some mixture of deterministic
/// assignments reproduce every support exactly? Equivalent to: every tuple
/// in every support is produced by an assignment consistent with all
/// supports.
pub fn exhaustive_lhv(dim: usize, setting_counts: &[usize], contexts: &[Vec<usize>], supports: &[HashSet<Vec<usize>>]) -> bool {
    let slots: usize = setting_counts.iter().sum();
    let total = dim.pow(slots as u32);
    let mut covered: Vec<HashSet<Vec<usize>>> = vec![HashSet::new(); contexts.len()];
    for code in 0..total {
        let mut c = code;
        let table: Vec<Vec<usize>> = setting_counts
            .iter()
            .map(|&k| {
                (0..k)
                    .map(|_| {
                        let o = c % dim;
                        c /= dim;
                        o
                    })
                    .collect()
            })
            .collect();
        let outs: Vec<Vec<usize>> = contexts
            .iter()
            .map(|ctx| ctx.iter().enumerate().map(|(i, &s)| table[i][s]).collect())
            .collect();
        if outs.iter().zip(supports).all(|(o, s)| s.contains(o)) {
            for (cov, o) in covered.iter_mut().zip(outs) {
                cov.insert(o);
            }
        }
    }
    covered.iter().zip(supports).all(|(c, s)| c == s)
}
