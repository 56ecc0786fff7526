use std::collections::BTreeSet;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mermin::MerminScenario;
use crate::error::{Error, Result};
use crate::phase::PhasePoint;

/// `N` parties measuring either X or `B = X after Z-phase b`; each
/// variation lists the parties measuring `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoMeasScenario {
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(rename = "N")]
    pub parties: usize,
    pub b: PhasePoint,
    pub variations: Vec<Vec<usize>>,
}

impl TwoMeasScenario {
    pub fn new(dim: usize, parties: usize, b: PhasePoint, variations: Vec<Vec<usize>>) -> Result<Self> {
        let ts = TwoMeasScenario {
            dim,
            parties,
            b,
            variations,
        };
        ts.check()?;
        Ok(ts)
    }

    fn check(&self) -> Result<()> {
        if self.b.dim() != self.dim {
            return Err(Error::InvalidInput(format!("b must have {} turns", self.dim - 1)));
        }
        let Some(first) = self.variations.first() else {
            return Err(Error::InvalidInput("at least one variation is required".into()));
        };
        for v in &self.variations {
            if v.len() != first.len() {
                return Err(Error::InvalidInput(
                    "every variation must have the same number of B measurements".into(),
                ));
            }
            let distinct: BTreeSet<_> = v.iter().collect();
            if distinct.len() != v.len() || v.iter().any(|&i| i >= self.parties) {
                return Err(Error::InvalidInput(format!("bad variation {v:?}")));
            }
        }
        Ok(())
    }

    /// Mermin's `(3,2,2)`: `b = π/2`, variations `YYX, YXY, XYY`.
    pub fn classic_322() -> Self {
        let b = PhasePoint::new(vec![Ratio::new(1, 4)]);
        TwoMeasScenario::new(2, 3, b, vec![vec![0, 1], vec![0, 2], vec![1, 2]]).expect("preset")
    }

    /// The five-party qutrit scenario with `b = (2π/9, −2π/9)` and the ten
    /// three-element subsets of parties as variations.
    pub fn qutrit_five_party() -> Self {
        let b = PhasePoint::new(vec![Ratio::new(1, 9), Ratio::new(-1, 9)]);
        let listing = [
            "BBBXX", "BBXBX", "BXBBX", "XBBBX", "XBXBB", "BBXXB", "BXBXB", "XBBXB", "BXXBB", "XXBBB",
        ];
        let variations = listing
            .iter()
            .map(|w| w.char_indices().filter(|(_, ch)| *ch == 'B').map(|(i, _)| i).collect())
            .collect();
        TwoMeasScenario::new(3, 5, b, variations).expect("preset")
    }

    pub fn beta(&self) -> usize {
        self.variations[0].len()
    }

    pub fn v(&self) -> usize {
        self.variations.len()
    }

    /// The control row (all X) followed by one row per variation.
    pub fn to_mermin_scenario(&self) -> Result<MerminScenario> {
        let x = PhasePoint::zero(self.dim);
        let mut rows = vec![vec![x.clone(); self.parties]];
        for v in &self.variations {
            let mut row = vec![x.clone(); self.parties];
            for &i in v {
                row[i] = self.b.clone();
            }
            rows.push(row);
        }
        MerminScenario::new(self.dim, rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewCondReport {
    pub effective: bool,
    /// `Σ_j e^{i c_j} + 1` as `[re, im]`.
    pub residual: [f64; 2],
    pub residual_norm: f64,
    /// `c_j` in turns.
    pub c: PhasePoint,
    /// `V ≡ 0 (mod D)`, so every `c_j` vanishes and the condition cannot hold.
    pub structurally_ineffective: bool,
    pub tol: f64,
}

/// `Σ_{j=1}^{D-1} e^{i c_j} = −1` with `c_j = β (V mod D) b_j`.
pub fn newcond(d: usize, v: usize, beta: usize, b: &PhasePoint, tol: f64) -> NewCondReport {
    let factor = (beta * (v % d)) as i64;
    let c = b.scale(factor);
    let sum: Complex64 = c
        .turns()
        .iter()
        .map(|t| Complex64::from_polar(1.0, TAU * *t.numer() as f64 / *t.denom() as f64))
        .sum::<Complex64>()
        + 1.0;
    let norm = sum.norm();
    let structural = v.is_multiple_of(d);
    NewCondReport {
        effective: !structural && norm <= tol,
        residual: [sum.re, sum.im],
        residual_norm: norm,
        c,
        structurally_ineffective: structural,
        tol,
    }
}

pub fn newcond_check(ts: &TwoMeasScenario, tol: f64) -> NewCondReport {
    newcond(ts.dim, ts.v(), ts.beta(), &ts.b, tol)
}

/// Lexicographically least phase among `b + h` for classical `h`; the
/// phases in one class define the same measurement up to relabeling.
pub fn canonical_representative(b: &PhasePoint) -> PhasePoint {
    let d = b.dim();
    (0..d as u64)
        .map(|g| b.add(&PhasePoint::classical(d, g)))
        .min()
        .expect("D >= 1")
}

fn grid(d: usize, q: usize, bound: u128) -> Result<Vec<PhasePoint>> {
    let dims = d - 1;
    let size = (q as u128).checked_pow(dims as u32).unwrap_or(u128::MAX);
    if size > bound {
        return Err(Error::resource("phase grid q^(D-1)", size, bound));
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut cur = vec![0usize; dims];
    for _ in 0..size {
        out.push(PhasePoint::new(
            cur.iter().map(|&k| Ratio::new(k as i64, q as i64)).collect(),
        ));
        for i in (0..dims).rev() {
            cur[i] += 1;
            if cur[i] < q {
                break;
            }
            cur[i] = 0;
        }
    }
    Ok(out)
}

/// Grid solutions of the effectiveness condition, one per class of
/// classically shifted phases, sorted.
pub fn scan_newcond(d: usize, v: usize, beta: usize, q: usize, tol: f64, bound: u128) -> Result<Vec<PhasePoint>> {
    check_grid_args(d, q)?;
    let sols: BTreeSet<PhasePoint> = grid(d, q, bound)?
        .into_par_iter()
        .filter(|b| newcond(d, v, beta, b, tol).effective)
        .map(|b| canonical_representative(&b))
        .collect();
    Ok(sols.into_iter().collect())
}

fn check_grid_args(d: usize, q: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidInput("dimension must be at least 2".into()));
    }
    if q < 1 {
        return Err(Error::InvalidInput("grid denominator must be at least 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Cyclic shifts of `B^β X^{N'−β}`.
    Cyclic,
    /// Every `β`-subset of the `N'` parties.
    AllSubsets,
}

/// A variation family on the first `active` parties (the rest measure X
/// throughout).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VariationFamily {
    pub kind: FamilyKind,
    pub active: usize,
    pub beta: usize,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

impl VariationFamily {
    pub fn v(&self) -> u128 {
        match self.kind {
            FamilyKind::Cyclic => self.active as u128,
            FamilyKind::AllSubsets => binomial(self.active, self.beta),
        }
    }

    /// Number of variations in which each active party measures `B`.
    pub fn b_count(&self) -> u128 {
        match self.kind {
            FamilyKind::Cyclic => self.beta as u128,
            FamilyKind::AllSubsets => binomial(self.active - 1, self.beta - 1),
        }
    }

    /// Each party's B-count vanishes mod `D` while `V` does not, so summing
    /// the variations against the control yields a parity contradiction.
    pub fn is_viable(&self, d: usize) -> bool {
        let d = d as u128;
        self.beta >= 1 && self.beta <= self.active && self.b_count().is_multiple_of(d) && !self.v().is_multiple_of(d)
    }

    pub fn variations(&self) -> Vec<Vec<usize>> {
        match self.kind {
            FamilyKind::Cyclic => (0..self.active)
                .map(|s| {
                    let mut v: Vec<usize> = (0..self.beta).map(|i| (i + s) % self.active).collect();
                    v.sort_unstable();
                    v
                })
                .collect(),
            FamilyKind::AllSubsets => subsets(self.active, self.beta),
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariationPolicy {
    /// Maximize over every viable family of either kind.
    Canonical,
    /// Cyclic families only, as in the controls-and-variations construction.
    Cyclic,
    /// Only the viable families with the largest `β`.
    MaxBeta,
}

impl VariationPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            VariationPolicy::Canonical => "canonical",
            VariationPolicy::Cyclic => "cyclic",
            VariationPolicy::MaxBeta => "max-beta",
        }
    }
}

impl std::str::FromStr for VariationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(VariationPolicy::Canonical),
            "cyclic" => Ok(VariationPolicy::Cyclic),
            "max-beta" => Ok(VariationPolicy::MaxBeta),
            other => Err(Error::Parse(format!("unknown variation policy {other:?}"))),
        }
    }
}

pub fn viable_families(n: usize, d: usize, policy: VariationPolicy) -> Vec<VariationFamily> {
    let mut fams = Vec::new();
    for active in 1..=n {
        for beta in 1..=active {
            for kind in [FamilyKind::Cyclic, FamilyKind::AllSubsets] {
                if policy == VariationPolicy::Cyclic && kind != FamilyKind::Cyclic {
                    continue;
                }
                let f = VariationFamily { kind, active, beta };
                if f.is_viable(d) {
                    fams.push(f);
                }
            }
        }
    }
    if policy == VariationPolicy::MaxBeta {
        if let Some(top) = fams.iter().map(|f| f.beta).max() {
            fams.retain(|f| f.beta == top);
        }
    }
    fams.sort();
    fams.dedup();
    fams
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCount {
    #[serde(rename = "N")]
    pub parties: usize,
    #[serde(rename = "D")]
    pub dim: usize,
    pub q: usize,
    pub policy: VariationPolicy,
    pub count: usize,
    pub family: Option<VariationFamily>,
    pub solutions: Vec<PhasePoint>,
    pub tol: f64,
}

impl PairCount {
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.parties, self.dim, self.q, self.policy.name(), self.count)
    }
}

pub const PAIR_CSV_HEADER: &str = "N,D,q,policy,count";

/// Effective `B` phases on the grid for one family: the variation sum
/// `β b` is classical (so each variation is a Mermin measurement) and the
/// effectiveness condition holds; one representative per classical class.
pub fn family_solutions(
    d: usize,
    family: &VariationFamily,
    grid_points: &[PhasePoint],
    tol: f64,
) -> Vec<PhasePoint> {
    let v = family.v();
    let v_mod = (v % d as u128) as usize;
    let sols: BTreeSet<PhasePoint> = grid_points
        .par_iter()
        .filter(|b| b.scale(family.beta as i64).is_classical())
        .filter(|b| newcond(d, v_mod, family.beta, b, tol).effective)
        .map(canonical_representative)
        .collect();
    sols.into_iter().collect()
}

/// Number of effective measurement pairs for `N` parties, maximized over
/// the policy's viable variation families.
pub fn count_effective_pairs(
    n: usize,
    d: usize,
    q: usize,
    policy: VariationPolicy,
    tol: f64,
    bound: u128,
) -> Result<PairCount> {
    check_grid_args(d, q)?;
    let points = grid(d, q, bound)?;
    let mut best: Option<(VariationFamily, Vec<PhasePoint>)> = None;
    for fam in viable_families(n, d, policy) {
        let sols = family_solutions(d, &fam, &points, tol);
        if best.as_ref().is_none_or(|(_, s)| sols.len() > s.len()) {
            best = Some((fam, sols));
        }
    }
    let (family, solutions) = match best {
        Some((f, s)) => (Some(f), s),
        None => (None, Vec::new()),
    };
    Ok(PairCount {
        parties: n,
        dim: d,
        q,
        policy,
        count: solutions.len(),
        family,
        solutions,
        tol,
    })
}

/// CSV series over a range of party counts.
pub fn pair_count_series(
    ns: impl IntoIterator<Item = usize>,
    d: usize,
    q: usize,
    policy: VariationPolicy,
    tol: f64,
    bound: u128,
) -> Result<(Vec<PairCount>, String)> {
    let mut out = format!("{PAIR_CSV_HEADER}\n");
    let mut counts = Vec::new();
    for n in ns {
        let c = count_effective_pairs(n, d, q, policy, tol, bound)?;
        out.push_str(&c.csv_row());
        out.push('\n');
        counts.push(c);
    }
    Ok((counts, out))
}
