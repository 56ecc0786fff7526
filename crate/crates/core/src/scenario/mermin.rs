use serde::{Deserialize, Serialize};

use crate::abgroup::{solve_system, EqSystem, FinAbGroup, Subgroup};
use crate::error::{Error, Result};
use crate::phase::PhasePoint;

/// `S` rows of `N` per-party Z-phases on `D`-level systems.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerminScenario {
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(rename = "N")]
    pub parties: usize,
    pub rows: Vec<Vec<PhasePoint>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    /// Classical point `g ∈ Z_D` of each row's phase sum.
    pub row_points: Vec<u64>,
}

impl MerminScenario {
    pub fn new(dim: usize, rows: Vec<Vec<PhasePoint>>) -> Result<Self> {
        let parties = rows.first().map_or(0, Vec::len);
        let s = MerminScenario { dim, parties, rows };
        s.check_shape()?;
        Ok(s)
    }

    pub fn check_shape(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidInput("dimension must be at least 2".into()));
        }
        if self.rows.is_empty() {
            return Err(Error::InvalidInput("a scenario needs at least one row".into()));
        }
        for row in &self.rows {
            if row.len() != self.parties {
                return Err(Error::Arity {
                    expected: self.parties,
                    got: row.len(),
                });
            }
            if let Some(p) = row.iter().find(|p| p.dim() != self.dim) {
                return Err(Error::Arity {
                    expected: self.dim - 1,
                    got: p.dim() - 1,
                });
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sc: MerminScenario =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        sc.check_shape()?;
        Ok(sc)
    }

    /// Mermin's three-qubit scenario: `XXX; YYX, YXY, XYY`.
    pub fn classic_322() -> Self {
        let x = PhasePoint::zero(2);
        let y = PhasePoint::parse("1/4", 2).expect("literal");
        let rows = vec![
            vec![x.clone(), x.clone(), x.clone()],
            vec![y.clone(), y.clone(), x.clone()],
            vec![y.clone(), x.clone(), y.clone()],
            vec![x, y.clone(), y],
        ];
        MerminScenario::new(2, rows).expect("well-formed")
    }

    pub fn row_sum(&self, s: usize) -> PhasePoint {
        PhasePoint::sum(self.dim, &self.rows[s])
    }

    /// Distinct phases used by each party, in order of first appearance.
    pub fn settings(&self) -> Vec<Vec<PhasePoint>> {
        (0..self.parties)
            .map(|i| {
                let mut seen: Vec<PhasePoint> = Vec::new();
                for row in &self.rows {
                    if !seen.contains(&row[i]) {
                        seen.push(row[i].clone());
                    }
                }
                seen
            })
            .collect()
    }

    /// `settings()[i]` index of the phase party `i` uses in row `s`.
    pub fn setting_index(&self, s: usize, i: usize) -> usize {
        let settings = self.settings();
        settings[i]
            .iter()
            .position(|p| *p == self.rows[s][i])
            .expect("row phase is a setting")
    }

    pub fn is_all_classical(&self) -> bool {
        self.rows.iter().flatten().all(PhasePoint::is_classical)
    }
}

/// Checks that every row's phase sum is X-classical.
pub fn validate_scenario(s: &MerminScenario) -> Result<ValidationReport> {
    s.check_shape()?;
    let mut points = Vec::new();
    let mut bad = Vec::new();
    for r in 0..s.rows.len() {
        match s.row_sum(r).classical_index() {
            Some(g) => points.push(g),
            None => bad.push(r),
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidScenario { rows: bad });
    }
    Ok(ValidationReport {
        valid: true,
        row_points: points,
    })
}

/// `Σ_r n_r a_r = a` with phases `a_r` and a classical right-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseEquation {
    #[serde(rename = "D")]
    pub dim: usize,
    pub coeffs: Vec<i64>,
    pub phases: Vec<PhasePoint>,
    pub rhs: PhasePoint,
}

impl PhaseEquation {
    pub fn new(dim: usize, coeffs: Vec<i64>, phases: Vec<PhasePoint>, rhs: PhasePoint) -> Self {
        PhaseEquation {
            dim,
            coeffs,
            phases,
            rhs,
        }
    }

    /// Checks the equation and returns `(n_r, a_r)` with every `n_r > 0`
    /// and the classical point of the right-hand side.
    fn normalized(&self) -> Result<(Vec<(usize, PhasePoint)>, u64)> {
        let d = self.dim;
        if self.coeffs.len() != self.phases.len() || self.coeffs.is_empty() {
            return Err(Error::Arity {
                expected: self.coeffs.len(),
                got: self.phases.len(),
            });
        }
        if self.rhs.dim() != d || self.phases.iter().any(|p| p.dim() != d) {
            return Err(Error::InvalidInput(format!("phases must have {} turns", d - 1)));
        }
        let lhs = self
            .coeffs
            .iter()
            .zip(&self.phases)
            .fold(PhasePoint::zero(d), |acc, (&n, a)| acc.add(&a.scale(n)));
        if lhs != self.rhs {
            return Err(Error::InvalidInput(format!(
                "the phases do not solve the equation: left side is {lhs}, right side {}",
                self.rhs
            )));
        }
        let Some(g) = self.rhs.classical_index() else {
            return Err(Error::InvalidInput(format!("right-hand side {} is not classical", self.rhs)));
        };
        if self.coeffs.contains(&0) || self.phases.iter().any(PhasePoint::is_zero) {
            return Err(Error::InvalidInput("coefficients and phases must be non-zero".into()));
        }

        // classical solvability: Σ n_r x_r = g over Z_D
        let zd = FinAbGroup::cyclic(d as u64)?;
        let sys = EqSystem::new(vec![self.coeffs.clone()], vec![zd.element(&[g as i64])?])?;
        if g == 0 || !solve_system(&zd, &sys, &Subgroup::whole(&zd))?.is_empty() {
            return Err(Error::NotAWitness(format!(
                "{sys} is solvable among classical points"
            )));
        }

        let terms = self
            .coeffs
            .iter()
            .zip(&self.phases)
            .map(|(&n, a)| {
                if n < 0 {
                    (n.unsigned_abs() as usize, a.neg())
                } else {
                    (n as usize, a.clone())
                }
            })
            .collect();
        Ok((terms, g))
    }
}

/// Smallest `n_0 ≥ 1` with `total + n_0 ≡ 1 (mod k)`.
pub fn control_count(total: usize, k: usize) -> usize {
    let r = (1 + k - total % k) % k;
    if r == 0 {
        k
    } else {
        r
    }
}

fn block(eq: &PhaseEquation, n0: Option<usize>) -> Result<(usize, Vec<Vec<PhasePoint>>)> {
    let (terms, _) = eq.normalized()?;
    let d = eq.dim;
    let total: usize = terms.iter().map(|(n, _)| n).sum();
    let n0 = match n0 {
        None => control_count(total, d),
        Some(n0) if n0 >= 1 && (total + n0) % d == 1 % d => n0,
        Some(n0) => {
            return Err(Error::InvalidInput(format!(
                "{n0} controls do not make the party count congruent to 1 mod {d}"
            )))
        }
    };
    let mut alpha: Vec<PhasePoint> = Vec::new();
    for (n, a) in &terms {
        alpha.extend(std::iter::repeat_n(a.clone(), *n));
    }
    alpha.extend(std::iter::repeat_n(PhasePoint::zero(d), n0));
    let v = alpha.len();
    let mut rows = vec![vec![PhasePoint::zero(d); v]; n0];
    for shift in 0..v {
        rows.push((0..v).map(|i| alpha[(i + shift) % v].clone()).collect());
    }
    Ok((v, rows))
}

/// Controls-and-variations scenario for a witness equation: `n_0` all-zero
/// rows followed by the `V` cyclic shifts of `(a_1^{n_1}, ..., a_M^{n_M}, 0^{n_0})`.
pub fn build_nonlocal_scenario(eq: &PhaseEquation) -> Result<MerminScenario> {
    let (_, rows) = block(eq, None)?;
    MerminScenario::new(eq.dim, rows)
}

/// As [`build_nonlocal_scenario`] with a chosen number of controls.
pub fn build_nonlocal_scenario_with_controls(eq: &PhaseEquation, n0: usize) -> Result<MerminScenario> {
    let (_, rows) = block(eq, Some(n0))?;
    MerminScenario::new(eq.dim, rows)
}

/// One block per equation on disjoint parties; each block's rows are
/// padded with zero phases on the other blocks' parties.
pub fn build_nonlocal_scenario_system(eqs: &[PhaseEquation]) -> Result<MerminScenario> {
    let Some(first) = eqs.first() else {
        return Err(Error::InvalidInput("no equations given".into()));
    };
    let d = first.dim;
    if eqs.iter().any(|e| e.dim != d) {
        return Err(Error::InvalidInput("equations over different dimensions".into()));
    }
    let blocks = eqs.iter().map(|e| block(e, None)).collect::<Result<Vec<_>>>()?;
    let total: usize = blocks.iter().map(|(v, _)| v).sum();
    let mut rows = Vec::new();
    let mut offset = 0;
    for (v, block_rows) in blocks {
        for r in block_rows {
            let mut row = vec![PhasePoint::zero(d); total];
            row[offset..offset + v].clone_from_slice(&r);
            rows.push(row);
        }
        offset += v;
    }
    MerminScenario::new(d, rows)
}
