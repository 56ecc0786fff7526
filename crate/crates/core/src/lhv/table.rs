use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qudit::{mermin_outcome_distribution_bounded, Distribution, DEFAULT_AMPLITUDE_BOUND};
use crate::scenario::MerminScenario;

/// Which setting each party uses in each row; outcomes live in `Z_dim`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contexts {
    pub dim: usize,
    pub setting_counts: Vec<usize>,
    pub rows: Vec<Vec<usize>>,
}

impl Contexts {
    pub fn parties(&self) -> usize {
        self.setting_counts.len()
    }

    pub fn of_scenario(s: &MerminScenario) -> Self {
        let settings = s.settings();
        let rows = s
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(i, p)| settings[i].iter().position(|q| q == p).expect("setting"))
                    .collect()
            })
            .collect();
        Contexts {
            dim: s.dim,
            setting_counts: settings.iter().map(Vec::len).collect(),
            rows,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.dim < 1 || self.rows.is_empty() {
            return Err(Error::InvalidInput("contexts need a dimension and at least one row".into()));
        }
        for row in &self.rows {
            if row.len() != self.parties() {
                return Err(Error::Arity {
                    expected: self.parties(),
                    got: row.len(),
                });
            }
            if row.iter().zip(&self.setting_counts).any(|(&k, &n)| k >= n) {
                return Err(Error::InvalidInput(format!("setting index out of range in {row:?}")));
            }
        }
        Ok(())
    }

    /// Unknown index of `(party, setting)` in party-major order.
    pub fn variable(&self, party: usize, setting: usize) -> usize {
        self.setting_counts[..party].iter().sum::<usize>() + setting
    }

    pub fn variables(&self) -> usize {
        self.setting_counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub row: usize,
    pub context: Vec<usize>,
    pub support: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<BTreeMap<String, f64>>,
}

/// Per-context sets of possible outcome tuples, optionally with the
/// probabilities they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PossibilisticTable {
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(rename = "N")]
    pub parties: usize,
    pub setting_counts: Vec<usize>,
    pub rows: Vec<TableRow>,
}

pub(crate) fn tuple_key(t: &[usize]) -> String {
    t.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

impl PossibilisticTable {
    pub fn contexts(&self) -> Contexts {
        Contexts {
            dim: self.dim,
            setting_counts: self.setting_counts.clone(),
            rows: self.rows.iter().map(|r| r.context.clone()).collect(),
        }
    }

    pub fn from_distributions(ctx: &Contexts, dists: &[Distribution], tol: f64) -> Result<Self> {
        ctx.check()?;
        if dists.len() != ctx.rows.len() {
            return Err(Error::Arity {
                expected: ctx.rows.len(),
                got: dists.len(),
            });
        }
        let rows = dists
            .iter()
            .zip(&ctx.rows)
            .enumerate()
            .map(|(s, (d, c))| {
                let support = d.support(tol);
                let probs = support.iter().map(|t| (tuple_key(t), d.prob(t))).collect();
                TableRow {
                    row: s,
                    context: c.clone(),
                    support,
                    probs: Some(probs),
                }
            })
            .collect();
        let t = PossibilisticTable {
            dim: ctx.dim,
            parties: ctx.parties(),
            setting_counts: ctx.setting_counts.clone(),
            rows,
        };
        t.check(tol)?;
        Ok(t)
    }

    pub fn from_supports(ctx: &Contexts, supports: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        ctx.check()?;
        let rows = supports
            .into_iter()
            .zip(&ctx.rows)
            .enumerate()
            .map(|(s, (support, c))| TableRow {
                row: s,
                context: c.clone(),
                support,
                probs: None,
            })
            .collect();
        let t = PossibilisticTable {
            dim: ctx.dim,
            parties: ctx.parties(),
            setting_counts: ctx.setting_counts.clone(),
            rows,
        };
        t.check(crate::DEFAULT_TOL)?;
        Ok(t)
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        self.contexts().check()?;
        for r in &self.rows {
            if r.support.is_empty() {
                return Err(Error::InvalidInput(format!("row {} has an empty support", r.row)));
            }
            if r.support.iter().any(|t| t.len() != self.parties || t.iter().any(|&o| o >= self.dim)) {
                return Err(Error::InvalidInput(format!("row {} has a malformed tuple", r.row)));
            }
            if let Some(p) = &r.probs {
                let total: f64 = p.values().sum();
                if (total - 1.0).abs() > tol.max(1e-9) * self.dim.pow(self.parties as u32) as f64 {
                    return Err(Error::InvalidInput(format!(
                        "row {} probabilities sum to {total}",
                        r.row
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn support_sets(&self) -> Vec<std::collections::HashSet<Vec<usize>>> {
        self.rows
            .iter()
            .map(|r| r.support.iter().cloned().collect())
            .collect()
    }
}

/// Born-rule table of a scenario, one exact distribution per row.
pub fn quantum_table(s: &MerminScenario, tol: f64) -> Result<PossibilisticTable> {
    quantum_table_bounded(s, tol, DEFAULT_AMPLITUDE_BOUND)
}

pub fn quantum_table_bounded(s: &MerminScenario, tol: f64, bound: usize) -> Result<PossibilisticTable> {
    s.check_shape()?;
    let dists = s
        .rows
        .par_iter()
        .map(|row| mermin_outcome_distribution_bounded(s.dim, s.parties, row, bound))
        .collect::<Result<Vec<_>>>()?;
    PossibilisticTable::from_distributions(&Contexts::of_scenario(s), &dists, tol)
}

/// Table in which row `s` is uniform on tuples summing to `points[s]`.
pub fn parity_table(ctx: &Contexts, points: &[u64]) -> Result<PossibilisticTable> {
    let n = ctx.parties();
    let d = ctx.dim;
    let dists: Vec<Distribution> = points
        .iter()
        .map(|&g| {
            let size = d.pow(n as u32);
            let p = 1.0 / d.pow(n.saturating_sub(1) as u32) as f64;
            let mut dist = Distribution {
                dim: d,
                parties: n,
                probabilities: vec![0.0; size],
            };
            for i in 0..size {
                if dist.tuple(i).iter().sum::<usize>() % d == g as usize % d {
                    dist.probabilities[i] = p;
                }
            }
            dist
        })
        .collect();
    PossibilisticTable::from_distributions(ctx, &dists, crate::DEFAULT_TOL)
}
