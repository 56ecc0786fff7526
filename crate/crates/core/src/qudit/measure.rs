use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{ghz_state_bounded, x_readout, z_phase_gate, StateVector, DEFAULT_AMPLITUDE_BOUND};
use crate::error::{Error, Result};
use crate::phase::PhasePoint;

/// Probability distribution over outcome tuples in `Z_D^N`, indexed in
/// mixed radix with party 0 most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub dim: usize,
    pub parties: usize,
    pub probabilities: Vec<f64>,
}

impl Distribution {
    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        let mut t = vec![0; self.parties];
        for slot in t.iter_mut().rev() {
            *slot = index % self.dim;
            index /= self.dim;
        }
        t
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &t| acc * self.dim + t)
    }

    pub fn prob(&self, tuple: &[usize]) -> f64 {
        self.probabilities[self.index(tuple)]
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Tuples with probability above `tol`, in index order.
    pub fn support(&self, tol: f64) -> Vec<Vec<usize>> {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > tol)
            .map(|(i, _)| self.tuple(i))
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Whether the distribution is uniform on tuples summing to `g` mod D
    /// and zero elsewhere.
    pub fn is_parity_uniform(&self, g: usize, tol: f64) -> bool {
        let p = (self.dim as f64).powi(1 - self.parties as i32);
        self.probabilities.iter().enumerate().all(|(i, &q)| {
            let s = self.tuple(i).iter().sum::<usize>() % self.dim;
            let expected = if s == g % self.dim { p } else { 0.0 };
            (q - expected).abs() <= tol
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome_tuple,probability\n");
        for (i, p) in self.probabilities.iter().enumerate() {
            let t: Vec<String> = self.tuple(i).iter().map(usize::to_string).collect();
            if *p != 0.0 && p.abs() < 1e-6 {
                out.push_str(&format!("{},{:e}\n", t.join(" "), p));
            } else {
                out.push_str(&format!("{},{}\n", t.join(" "), p));
            }
        }
        out
    }
}

fn check_phases(d: usize, n: usize, phases: &[PhasePoint]) -> Result<()> {
    if phases.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: phases.len(),
        });
    }
    if let Some(p) = phases.iter().find(|p| p.dim() != d) {
        return Err(Error::Arity {
            expected: d - 1,
            got: p.dim() - 1,
        });
    }
    Ok(())
}

fn born(state: &StateVector) -> Distribution {
    Distribution {
        dim: state.dim,
        parties: state.systems,
        probabilities: state.amplitudes.iter().map(|z| z.norm_sqr()).collect(),
    }
}

pub fn mermin_outcome_distribution(d: usize, n: usize, phases: &[PhasePoint]) -> Result<Distribution> {
    mermin_outcome_distribution_bounded(d, n, phases, DEFAULT_AMPLITUDE_BOUND)
}

/// Applies each party's phase gate to the GHZ state and measures every
/// system in the X basis.
pub fn mermin_outcome_distribution_bounded(
    d: usize,
    n: usize,
    phases: &[PhasePoint],
    bound: usize,
) -> Result<Distribution> {
    check_phases(d, n, phases)?;
    let mut state = ghz_state_bounded(d, n, bound)?;
    let readout = x_readout(d);
    for (i, p) in phases.iter().enumerate() {
        state.apply_local(&z_phase_gate(p).matrix, i);
        state.apply_local(&readout, i);
    }
    Ok(born(&state))
}

/// Same distribution via the equivalent state in which the summed phase
/// acts on the first system alone.
pub fn mermin_outcome_distribution_simplified(
    d: usize,
    n: usize,
    phases: &[PhasePoint],
) -> Result<Distribution> {
    check_phases(d, n, phases)?;
    let sigma = PhasePoint::sum(d, phases);
    let mut state = ghz_state_bounded(d, n, DEFAULT_AMPLITUDE_BOUND)?;
    state.apply_local(&z_phase_gate(&sigma).matrix, 0);
    let readout = x_readout(d);
    for i in 0..n {
        state.apply_local(&readout, i);
    }
    Ok(born(&state))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplementarityReport {
    /// `overlaps[i][j] = |⟨a_i|b_j⟩|²`.
    pub overlaps: Vec<Vec<f64>>,
    pub mutually_unbiased: bool,
    pub tol: f64,
}

fn check_orthonormal(name: &str, basis: &[Vec<Complex64>], tol: f64) -> Result<()> {
    let d = basis.len();
    if d == 0 || basis.iter().any(|v| v.len() != d) {
        return Err(Error::Basis(format!("{name} is not a square family of vectors")));
    }
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            if (ip - Complex64::new(expected, 0.0)).norm() > tol {
                return Err(Error::Basis(format!(
                    "{name} vectors {i} and {j} have inner product {ip}"
                )));
            }
        }
    }
    Ok(())
}

pub fn complementarity_report(
    a: &[Vec<Complex64>],
    b: &[Vec<Complex64>],
    tol: f64,
) -> Result<ComplementarityReport> {
    check_orthonormal("first basis", a, tol)?;
    check_orthonormal("second basis", b, tol)?;
    if a.len() != b.len() {
        return Err(Error::Basis("bases have different dimensions".into()));
    }
    let target = 1.0 / a.len() as f64;
    let overlaps: Vec<Vec<f64>> = a
        .iter()
        .map(|u| {
            b.iter()
                .map(|v| u.iter().zip(v).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr())
                .collect()
        })
        .collect();
    let mutually_unbiased = overlaps.iter().flatten().all(|&o| (o - target).abs() <= tol);
    Ok(ComplementarityReport {
        overlaps,
        mutually_unbiased,
        tol,
    })
}
