use serde::{Deserialize, Serialize};

use super::table::Contexts;
use crate::abgroup::{solve_system, EqSystem, FinAbGroup, GroupElement, SolutionSet, Subgroup};
use crate::error::{Error, Result};
use crate::phase::PhasePoint;
use crate::qudit::Distribution;
use crate::scenario::{validate_scenario, MerminScenario};

/// Outcome fixed in advance for every `(party, setting)`.
pub type LocalAssignment = Vec<Vec<u64>>;

/// A mixture of deterministic local assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvModel {
    pub dim: usize,
    pub setting_counts: Vec<usize>,
    pub assignments: Vec<LocalAssignment>,
    pub weights: Vec<f64>,
}

impl LhvModel {
    pub fn uniform(dim: usize, setting_counts: Vec<usize>, assignments: Vec<LocalAssignment>) -> Self {
        let w = 1.0 / assignments.len().max(1) as f64;
        let weights = vec![w; assignments.len()];
        LhvModel {
            dim,
            setting_counts,
            assignments,
            weights,
        }
    }

    pub fn outcome(a: &LocalAssignment, context: &[usize]) -> Vec<usize> {
        context
            .iter()
            .enumerate()
            .map(|(i, &k)| a[i][k] as usize)
            .collect()
    }

    /// Distribution the model induces on one context.
    pub fn row_distribution(&self, context: &[usize]) -> Distribution {
        let n = context.len();
        let mut dist = Distribution {
            dim: self.dim,
            parties: n,
            probabilities: vec![0.0; self.dim.pow(n as u32)],
        };
        for (a, w) in self.assignments.iter().zip(&self.weights) {
            let idx = dist.index(&Self::outcome(a, context));
            dist.probabilities[idx] += w;
        }
        dist
    }
}

/// The uniform mixture over `u ∈ Z_D^N` with `Σ u ≡ 0`, party `i` answering
/// `u_i + b` for a setting with classical value `b`. Each context then
/// outputs a uniformly random tuple summing to the sum of its `b`s.
pub fn trivial_model(ctx: &Contexts, values: &[Vec<u64>], bound: u128) -> Result<LhvModel> {
    ctx.check()?;
    let d = ctx.dim as u64;
    let n = ctx.parties();
    let size = (d as u128).checked_pow(n.saturating_sub(1) as u32).unwrap_or(u128::MAX);
    if size > bound {
        return Err(Error::resource("local hidden variable model", size, bound));
    }
    let mut assignments = Vec::with_capacity(size as usize);
    let mut free = vec![0u64; n.saturating_sub(1)];
    for _ in 0..size {
        let last = (d - free.iter().sum::<u64>() % d) % d;
        let u: Vec<u64> = free.iter().copied().chain(std::iter::once(last)).collect();
        let a: LocalAssignment = (0..n)
            .map(|i| values[i].iter().map(|&b| (u[i] + b) % d).collect())
            .collect();
        assignments.push(a);
        for slot in free.iter_mut().rev() {
            *slot += 1;
            if *slot < d {
                break;
            }
            *slot = 0;
        }
    }
    Ok(LhvModel::uniform(ctx.dim, ctx.setting_counts.clone(), assignments))
}

/// Local model for a scenario once every phase used has been replaced by a
/// classical value `b_r ∈ Z_D` solving the same row equations.
pub fn build_trivial_lhv(s: &MerminScenario, solution: &[(PhasePoint, u64)], bound: u128) -> Result<LhvModel> {
    let points = validate_scenario(s)?.row_points;
    let settings = s.settings();
    let d = s.dim as u64;
    let values = settings
        .iter()
        .map(|ps| {
            ps.iter()
                .map(|p| {
                    solution
                        .iter()
                        .find(|(q, _)| q == p)
                        .map(|&(_, b)| b % d)
                        .ok_or_else(|| Error::InvalidInput(format!("no classical value given for phase {p}")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let ctx = Contexts::of_scenario(s);
    check_solution(&ctx, &values, &points)?;
    trivial_model(&ctx, &values, bound)
}

fn check_solution(ctx: &Contexts, values: &[Vec<u64>], points: &[u64]) -> Result<()> {
    let d = ctx.dim as u64;
    for (s, (row, &g)) in ctx.rows.iter().zip(points).enumerate() {
        let sum: u64 = row.iter().enumerate().map(|(i, &k)| values[i][k]).sum::<u64>() % d;
        if sum != g % d {
            return Err(Error::InvalidInput(format!(
                "classical values sum to {sum} on row {s}, expected {g}"
            )));
        }
    }
    Ok(())
}

/// Classical values for an all-classical scenario: each phase's own index.
pub fn identity_solution(s: &MerminScenario) -> Result<Vec<(PhasePoint, u64)>> {
    let mut out: Vec<(PhasePoint, u64)> = Vec::new();
    for p in s.rows.iter().flatten() {
        if out.iter().any(|(q, _)| q == p) {
            continue;
        }
        let g = p
            .classical_index()
            .ok_or_else(|| Error::InvalidInput(format!("phase {p} is not classical")))?;
        out.push((p.clone(), g));
    }
    Ok(out)
}

/// A scenario whose phases live in an abstract finite abelian phase group,
/// with classical points the cyclic subgroup generated by `classical`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupScenario {
    pub group: FinAbGroup,
    pub classical: GroupElement,
    pub rows: Vec<Vec<GroupElement>>,
}

impl GroupScenario {
    pub fn new(group: FinAbGroup, classical: GroupElement, rows: Vec<Vec<GroupElement>>) -> Result<Self> {
        group.check(&classical)?;
        let n = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("rows must be non-empty and of equal length".into()));
        }
        for x in rows.iter().flatten() {
            group.check(x)?;
        }
        Ok(GroupScenario {
            group,
            classical,
            rows,
        })
    }

    /// Outcome alphabet size, the order of the classical subgroup.
    pub fn k(&self) -> usize {
        self.group.element_order(&self.classical) as usize
    }

    pub fn classical_subgroup(&self) -> Subgroup {
        Subgroup::new(&self.group, vec![self.classical.clone()]).expect("generator is in the group")
    }

    /// Index `m` with `x = m · classical`, if `x` is classical.
    pub fn classical_index(&self, x: &GroupElement) -> Option<u64> {
        (0..self.k() as u64).find(|&m| self.group.scale(m as i64, &self.classical) == *x)
    }

    pub fn settings(&self) -> Vec<Vec<GroupElement>> {
        let n = self.rows[0].len();
        (0..n)
            .map(|i| {
                let mut seen: Vec<GroupElement> = Vec::new();
                for row in &self.rows {
                    if !seen.contains(&row[i]) {
                        seen.push(row[i].clone());
                    }
                }
                seen
            })
            .collect()
    }

    pub fn contexts(&self) -> Contexts {
        let settings = self.settings();
        Contexts {
            dim: self.k(),
            setting_counts: settings.iter().map(Vec::len).collect(),
            rows: self
                .rows
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .map(|(i, x)| settings[i].iter().position(|y| y == x).expect("setting"))
                        .collect()
                })
                .collect(),
        }
    }

    /// Classical index of every row's phase sum.
    pub fn row_points(&self) -> Result<Vec<u64>> {
        let mut bad = Vec::new();
        let mut pts = Vec::new();
        for (s, row) in self.rows.iter().enumerate() {
            let sum = row.iter().fold(self.group.zero(), |acc, x| self.group.add(&acc, x));
            match self.classical_index(&sum) {
                Some(m) => pts.push(m),
                None => bad.push(s),
            }
        }
        if bad.is_empty() {
            Ok(pts)
        } else {
            Err(Error::InvalidScenario { rows: bad })
        }
    }

    /// The distinct phases and the row equations `Σ_i x_{phase(s,i)} = row sum`.
    pub fn equation_system(&self) -> Result<(Vec<GroupElement>, EqSystem)> {
        let mut phases: Vec<GroupElement> = Vec::new();
        for x in self.rows.iter().flatten() {
            if !phases.contains(x) {
                phases.push(x.clone());
            }
        }
        let mut coeffs = Vec::new();
        let mut rhs = Vec::new();
        for row in &self.rows {
            let mut c = vec![0i64; phases.len()];
            for x in row {
                c[phases.iter().position(|y| y == x).expect("listed")] += 1;
            }
            coeffs.push(c);
            rhs.push(row.iter().fold(self.group.zero(), |acc, x| self.group.add(&acc, x)));
        }
        Ok((phases, EqSystem::new(coeffs, rhs)?))
    }

    /// Classical replacements `b_r` for the phases, found by solving the
    /// row equations inside the classical subgroup.
    pub fn classical_solution(&self) -> Result<Vec<(GroupElement, u64)>> {
        self.row_points()?;
        let (phases, sys) = self.equation_system()?;
        match solve_system(&self.group, &sys, &self.classical_subgroup())? {
            SolutionSet::Empty { .. } => Err(Error::Domain(
                "the row equations have no classical solution".into(),
            )),
            SolutionSet::Solvable { witness, .. } => phases
                .into_iter()
                .zip(witness)
                .map(|(p, b)| {
                    let m = self.classical_index(&b).expect("solution lies in the classical subgroup");
                    Ok((p, m))
                })
                .collect(),
        }
    }

    pub fn build_trivial_lhv(&self, solution: &[(GroupElement, u64)], bound: u128) -> Result<LhvModel> {
        let points = self.row_points()?;
        let values = self
            .settings()
            .iter()
            .map(|xs| {
                xs.iter()
                    .map(|x| {
                        solution
                            .iter()
                            .find(|(y, _)| y == x)
                            .map(|&(_, b)| b % self.k() as u64)
                            .ok_or_else(|| Error::InvalidInput(format!("no classical value for {x}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let ctx = self.contexts();
        check_solution(&ctx, &values, &points)?;
        trivial_model(&ctx, &values, bound)
    }
}
