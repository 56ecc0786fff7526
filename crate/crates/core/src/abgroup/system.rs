use serde::{Deserialize, Serialize};

use super::group::{FinAbGroup, GroupElement};
use super::intmat::solve_integer;
use super::subgroup::Subgroup;
use crate::error::{Error, Result};

/// A finite system `sum_j coeffs[p][j] * x_j = rhs[p]` over an abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqSystem {
    pub coeffs: Vec<Vec<i64>>,
    pub rhs: Vec<GroupElement>,
}

impl EqSystem {
    pub fn new(coeffs: Vec<Vec<i64>>, rhs: Vec<GroupElement>) -> Result<Self> {
        let sys = EqSystem { coeffs, rhs };
        sys.check_shape()?;
        Ok(sys)
    }

    /// One equation `n x = h`.
    pub fn single(n: i64, h: GroupElement) -> Self {
        EqSystem {
            coeffs: vec![vec![n]],
            rhs: vec![h],
        }
    }

    pub fn equations(&self) -> usize {
        self.coeffs.len()
    }

    pub fn unknowns(&self) -> usize {
        self.coeffs.first().map_or(0, Vec::len)
    }

    fn check_shape(&self) -> Result<()> {
        if self.coeffs.len() != self.rhs.len() {
            return Err(Error::MalformedSystem(format!(
                "{} coefficient rows but {} right-hand sides",
                self.coeffs.len(),
                self.rhs.len()
            )));
        }
        let l = self.unknowns();
        if self.coeffs.iter().any(|r| r.len() != l) {
            return Err(Error::MalformedSystem("ragged coefficient matrix".into()));
        }
        Ok(())
    }

    pub fn check_over(&self, g: &FinAbGroup) -> Result<()> {
        self.check_shape()?;
        for h in &self.rhs {
            if !g.contains(h) {
                return Err(Error::MalformedSystem(format!(
                    "right-hand side {h} is not in {g}"
                )));
            }
        }
        Ok(())
    }

    /// Substitutes an assignment and compares against the right-hand sides.
    pub fn is_satisfied_by(&self, g: &FinAbGroup, xs: &[GroupElement]) -> bool {
        if xs.len() != self.unknowns() {
            return false;
        }
        self.coeffs.iter().zip(&self.rhs).all(|(row, h)| {
            let lhs = row
                .iter()
                .zip(xs)
                .fold(g.zero(), |acc, (&n, x)| g.add(&acc, &g.scale(n, x)));
            &lhs == h
        })
    }
}

impl std::fmt::Display for EqSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let single_var = self.unknowns() == 1;
        let eqs: Vec<String> = self
            .coeffs
            .iter()
            .zip(&self.rhs)
            .map(|(row, h)| {
                let terms: Vec<String> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &n)| n != 0)
                    .map(|(j, &n)| {
                        let var = if single_var {
                            "x".to_string()
                        } else {
                            format!("x{}", j + 1)
                        };
                        if n == 1 {
                            var
                        } else {
                            format!("{n}{var}")
                        }
                    })
                    .collect();
                let lhs = if terms.is_empty() {
                    "0".to_string()
                } else {
                    terms.join("+")
                };
                format!("{lhs}={h}")
            })
            .collect();
        write!(f, "{}", eqs.join("; "))
    }
}

/// Outcome of [`solve_system`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionSet {
    /// No solution in the domain. `combination / divisor` is a rational
    /// combination of the lifted integer equations (one per equation and
    /// coordinate, equation-major) whose left side is integral while the
    /// right side is not.
    Empty {
        combination: Vec<i128>,
        divisor: i128,
    },
    /// One solution plus generators of the homogeneous solution group; every
    /// solution is `witness + (integer combination of homogeneous)`.
    Solvable {
        witness: Vec<GroupElement>,
        homogeneous: Vec<Vec<GroupElement>>,
    },
}

impl SolutionSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, SolutionSet::Empty { .. })
    }

    pub fn witness(&self) -> Option<&[GroupElement]> {
        match self {
            SolutionSet::Solvable { witness, .. } => Some(witness),
            SolutionSet::Empty { .. } => None,
        }
    }
}

/// Solves `sys` with every unknown ranging over `domain`.
///
/// Unknowns are parametrized through the Hermite basis of `domain`'s lattice
/// and the congruences are lifted to one integer system, which is decided by
/// Smith normal form.
pub fn solve_system(g: &FinAbGroup, sys: &EqSystem, domain: &Subgroup) -> Result<SolutionSet> {
    sys.check_over(g)?;
    if domain.ambient() != g {
        return Err(Error::Domain("solution domain is not a subgroup of G".into()));
    }
    let k = g.rank();
    let unknowns = sys.unknowns();
    let eqs = sys.equations();
    let basis = domain.lattice_basis();
    let moduli = g.factors();

    let t_cols = unknowns * k;
    let cols = t_cols + eqs * k;
    let mut matrix = vec![vec![0i128; cols]; eqs * k];
    let mut rhs = vec![0i128; eqs * k];
    for p in 0..eqs {
        for c in 0..k {
            let row = &mut matrix[p * k + c];
            for j in 0..unknowns {
                let n = i128::from(sys.coeffs[p][j]);
                for (l, b) in basis.iter().enumerate() {
                    row[j * k + l] = n * b[c];
                }
            }
            row[t_cols + p * k + c] = i128::from(moduli[c]);
            rhs[p * k + c] = i128::from(sys.rhs[p].0[c]);
        }
    }

    let to_assignment = |t: &[i128]| -> Vec<GroupElement> {
        (0..unknowns)
            .map(|j| {
                let v: Vec<i128> = (0..k)
                    .map(|c| (0..k).map(|l| t[j * k + l] * basis[l][c]).sum())
                    .collect();
                g.element_from_i128(&v)
            })
            .collect()
    };

    match solve_integer(&matrix, cols, &rhs)? {
        Err((combination, divisor)) => Ok(SolutionSet::Empty {
            combination,
            divisor,
        }),
        Ok(sol) => {
            let witness = to_assignment(&sol.particular);
            let homogeneous = sol
                .kernel
                .iter()
                .map(|v| to_assignment(v))
                .filter(|xs| xs.iter().any(|x| !x.is_zero()))
                .collect();
            Ok(SolutionSet::Solvable {
                witness,
                homogeneous,
            })
        }
    }
}
