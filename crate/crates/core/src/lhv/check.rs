use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{LhvModel, LocalAssignment};
use super::table::{Contexts, PossibilisticTable};
use crate::abgroup::{solve_system, EqSystem, FinAbGroup, GroupElement, SolutionSet, Subgroup};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LhvMode {
    /// Linear algebra over `Z_D` on rows whose support has a fixed sum.
    ParityOnly,
    /// Exhaustive search over deterministic assignments.
    Possibilistic,
}

impl std::str::FromStr for LhvMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parity" | "parity-only" => Ok(LhvMode::ParityOnly),
            "possibilistic" => Ok(LhvMode::Possibilistic),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Existence {
    Exists,
    Refuted,
    /// Parity constraints are consistent but do not settle the question.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// `Σ_s weights[s] · (row s constraint)` has every coefficient `≡ 0`
    /// but right-hand side `rhs ≢ 0 (mod modulus)`.
    Parity {
        weights: Vec<i64>,
        rhs: i64,
        modulus: u64,
        statement: String,
    },
    /// No deterministic assignment consistent with every row produces this
    /// possible outcome.
    Uncovered { row: usize, tuple: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvVerdict {
    pub mode: LhvMode,
    pub existence: Existence,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<LhvModel>,
    /// Search nodes (possibilistic) or solutions examined (parity).
    pub explored: u64,
}

impl LhvVerdict {
    pub fn exists(&self) -> Option<bool> {
        match self.existence {
            Existence::Exists => Some(true),
            Existence::Refuted => Some(false),
            Existence::Inconclusive => None,
        }
    }
}

pub fn lhv_exists(t: &PossibilisticTable, mode: LhvMode, bound: u64) -> Result<LhvVerdict> {
    t.check(crate::DEFAULT_TOL)?;
    match mode {
        LhvMode::ParityOnly => parity_check(t, bound),
        LhvMode::Possibilistic => possibilistic_check(t, bound),
    }
}

/// The `Z_D` system `Σ_i x_{i, setting(s,i)} = a_s` over rows `s` whose
/// support has constant coordinate sum `a_s`. Returns the system and the
/// row index of each equation.
pub fn parity_system(t: &PossibilisticTable) -> Result<(FinAbGroup, EqSystem, Vec<usize>)> {
    let ctx = t.contexts();
    let d = t.dim;
    let zd = FinAbGroup::cyclic(d as u64)?;
    let mut coeffs = Vec::new();
    let mut rhs = Vec::new();
    let mut rows = Vec::new();
    for (s, row) in t.rows.iter().enumerate() {
        let sums: HashSet<usize> = row.support.iter().map(|x| x.iter().sum::<usize>() % d).collect();
        if sums.len() != 1 {
            continue;
        }
        let a = *sums.iter().next().expect("one sum");
        let mut c = vec![0i64; ctx.variables()];
        for (i, &k) in row.context.iter().enumerate() {
            c[ctx.variable(i, k)] += 1;
        }
        coeffs.push(c);
        rhs.push(zd.element(&[a as i64])?);
        rows.push(s);
    }
    let sys = if coeffs.is_empty() {
        EqSystem::new(vec![vec![0; ctx.variables()]], vec![zd.zero()])?
    } else {
        EqSystem::new(coeffs, rhs)?
    };
    Ok((zd, sys, rows))
}

fn consistent(t_sets: &[HashSet<Vec<usize>>], ctx: &Contexts, a: &LocalAssignment) -> bool {
    ctx.rows
        .iter()
        .zip(t_sets)
        .all(|(c, s)| s.contains(&LhvModel::outcome(a, c)))
}

/// Verdict from a set of consistent assignments: a local model exists iff
/// together they realize every possible outcome.
fn from_assignments(
    t: &PossibilisticTable,
    mode: LhvMode,
    assignments: Vec<LocalAssignment>,
    explored: u64,
    refute_on_gap: bool,
) -> LhvVerdict {
    let ctx = t.contexts();
    let mut covered: Vec<HashSet<Vec<usize>>> = vec![HashSet::new(); t.rows.len()];
    for a in &assignments {
        for (s, c) in ctx.rows.iter().enumerate() {
            covered[s].insert(LhvModel::outcome(a, c));
        }
    }
    let gap = t.rows.iter().enumerate().find_map(|(s, r)| {
        r.support
            .iter()
            .find(|x| !covered[s].contains(*x))
            .map(|x| (s, x.clone()))
    });
    match gap {
        None => LhvVerdict {
            mode,
            existence: Existence::Exists,
            certificate: None,
            model: Some(LhvModel::uniform(t.dim, t.setting_counts.clone(), assignments)),
            explored,
        },
        Some((row, tuple)) => LhvVerdict {
            mode,
            existence: if refute_on_gap {
                Existence::Refuted
            } else {
                Existence::Inconclusive
            },
            certificate: refute_on_gap.then_some(Certificate::Uncovered { row, tuple }),
            model: None,
            explored,
        },
    }
}

fn parity_check(t: &PossibilisticTable, bound: u64) -> Result<LhvVerdict> {
    let (zd, sys, rows) = parity_system(t)?;
    let d = t.dim as i64;
    match solve_system(&zd, &sys, &Subgroup::whole(&zd))? {
        SolutionSet::Empty {
            combination,
            divisor,
        } => {
            let mut weights = vec![0i64; t.rows.len()];
            for (p, &s) in rows.iter().enumerate() {
                let w = (i128::from(d) * combination[p]) / divisor;
                weights[s] = (w.rem_euclid(i128::from(d))) as i64;
            }
            let rhs = rows
                .iter()
                .enumerate()
                .map(|(p, &s)| weights[s] * sys.rhs[p].coords()[0] as i64)
                .sum::<i64>()
                .rem_euclid(d);
            let terms: Vec<String> = weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0)
                .map(|(s, &w)| if w == 1 { format!("row{s}") } else { format!("{w}*row{s}") })
                .collect();
            let statement = format!("{}: 0 = {rhs} (mod {d})", terms.join(" + "));
            Ok(LhvVerdict {
                mode: LhvMode::ParityOnly,
                existence: Existence::Refuted,
                certificate: Some(Certificate::Parity {
                    weights,
                    rhs,
                    modulus: d as u64,
                    statement,
                }),
                model: None,
                explored: 0,
            })
        }
        SolutionSet::Solvable {
            witness,
            homogeneous,
        } => {
            let solutions = span(&zd, &witness, &homogeneous, bound)?;
            let ctx = t.contexts();
            let sets = t.support_sets();
            let explored = solutions.len() as u64;
            let good: Vec<LocalAssignment> = solutions
                .into_iter()
                .map(|xs| unflatten(&ctx, &xs))
                .filter(|a| consistent(&sets, &ctx, a))
                .collect();
            Ok(from_assignments(t, LhvMode::ParityOnly, good, explored, false))
        }
    }
}

fn unflatten(ctx: &Contexts, xs: &[GroupElement]) -> LocalAssignment {
    let mut k = 0;
    ctx.setting_counts
        .iter()
        .map(|&n| {
            let v = xs[k..k + n].iter().map(|x| x.coords()[0]).collect();
            k += n;
            v
        })
        .collect()
}

/// Every `witness + Σ c_j h_j`.
fn span(
    g: &FinAbGroup,
    witness: &[GroupElement],
    homogeneous: &[Vec<GroupElement>],
    bound: u64,
) -> Result<Vec<Vec<GroupElement>>> {
    let mut seen: HashSet<Vec<GroupElement>> = HashSet::new();
    let mut frontier = vec![witness.to_vec()];
    seen.insert(witness.to_vec());
    while let Some(x) = frontier.pop() {
        for h in homogeneous {
            let y: Vec<GroupElement> = x.iter().zip(h).map(|(a, b)| g.add(a, b)).collect();
            if seen.insert(y.clone()) {
                if seen.len() as u64 > bound {
                    return Err(Error::resource("parity solution enumeration", seen.len() as u128, bound as u128));
                }
                frontier.push(y);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Backtracking over `(party, setting)` values in party-major order; a row
/// is checked as soon as its last party is assigned.
fn possibilistic_check(t: &PossibilisticTable, bound: u64) -> Result<LhvVerdict> {
    let ctx = t.contexts();
    let sets = t.support_sets();
    let d = t.dim as u64;
    let nvars = ctx.variables();
    let n = ctx.parties();
    let mut owner = Vec::with_capacity(nvars);
    for (i, &c) in ctx.setting_counts.iter().enumerate() {
        owner.extend(std::iter::repeat_n(i, c));
    }
    // rows become checkable once every variable of party `last` is set
    let party_end: Vec<usize> = (0..n).map(|i| ctx.variable(i, 0) + ctx.setting_counts[i]).collect();
    let counter = AtomicU64::new(0);

    struct Search<'a> {
        ctx: &'a Contexts,
        sets: &'a [HashSet<Vec<usize>>],
        d: u64,
        party_end: &'a [usize],
        counter: &'a AtomicU64,
        bound: u64,
    }

    impl Search<'_> {
        fn rows_ok(&self, flat: &[u64], upto_party: usize) -> bool {
            self.ctx.rows.iter().zip(self.sets).all(|(c, s)| {
                let prefix: Vec<usize> = (0..=upto_party)
                    .map(|i| flat[self.ctx.variable(i, c[i])] as usize)
                    .collect();
                s.iter().any(|x| x[..=upto_party] == prefix[..])
            })
        }

        fn go(&self, flat: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) -> Result<()> {
            let seen = self.counter.fetch_add(1, Ordering::Relaxed) + 1;
            if seen > self.bound {
                return Err(Error::resource("assignment search nodes", u128::from(seen), u128::from(self.bound)));
            }
            if let Some(p) = self.party_end.iter().position(|&e| e == flat.len()) {
                if !self.rows_ok(flat, p) {
                    return Ok(());
                }
            }
            if flat.len() == self.ctx.variables() {
                out.push(flat.clone());
                return Ok(());
            }
            for v in 0..self.d {
                flat.push(v);
                self.go(flat, out)?;
                flat.pop();
            }
            Ok(())
        }
    }

    let search = Search {
        ctx: &ctx,
        sets: &sets,
        d,
        party_end: &party_end,
        counter: &counter,
        bound,
    };
    let found: Vec<Vec<u64>> = if nvars == 0 {
        vec![Vec::new()]
    } else {
        (0..d)
            .into_par_iter()
            .map(|v| {
                let mut flat = vec![v];
                let mut out = Vec::new();
                search.go(&mut flat, &mut out).map(|_| out)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect()
    };
    let assignments: Vec<LocalAssignment> = found
        .iter()
        .map(|flat| {
            let mut k = 0;
            ctx.setting_counts
                .iter()
                .map(|&c| {
                    let v = flat[k..k + c].to_vec();
                    k += c;
                    v
                })
                .collect()
        })
        .collect();
    let explored = counter.load(Ordering::Relaxed);
    Ok(from_assignments(t, LhvMode::Possibilistic, assignments, explored, true))
}
