use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::PhasePoint;

/// Default cap on the number of amplitudes a state may hold.
pub const DEFAULT_AMPLITUDE_BOUND: usize = 1 << 24;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Primitive `D`-th root of unity raised to `k`.
pub fn omega(d: usize, k: i64) -> Complex64 {
    let k = k.rem_euclid(d as i64);
    Complex64::from_polar(1.0, TAU * k as f64 / d as f64)
}

pub(crate) fn checked_size(d: usize, n: usize, bound: usize) -> Result<usize> {
    let mut size: u128 = 1;
    for _ in 0..n {
        size = size.saturating_mul(d as u128);
    }
    if size > bound as u128 {
        return Err(Error::resource("state dimension D^N", size, bound as u128));
    }
    Ok(size as usize)
}

/// A pure state on `n` qudits of dimension `d`, amplitudes in
/// mixed-radix order with the first system most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub dim: usize,
    pub systems: usize,
    pub amplitudes: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct StateDump {
    dim: usize,
    systems: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateDump {
            dim: self.dim,
            systems: self.systems,
            amplitudes: self.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dump = StateDump::deserialize(d)?;
        StateVector::new(
            dump.dim,
            dump.systems,
            dump.amplitudes.iter().map(|&[re, im]| c(re, im)).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl StateVector {
    pub fn new(dim: usize, systems: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = checked_size(dim, systems, usize::MAX)?;
        if amplitudes.len() != expected {
            return Err(Error::Arity {
                expected,
                got: amplitudes.len(),
            });
        }
        Ok(StateVector {
            dim,
            systems,
            amplitudes,
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Index into `amplitudes` of a basis tuple.
    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &t| acc * self.dim + t)
    }

    /// Applies a `d x d` operator to system `target` in place.
    pub fn apply_local(&mut self, op: &DMatrix<Complex64>, target: usize) {
        let d = self.dim;
        let stride = d.pow((self.systems - target - 1) as u32);
        let block = stride * d;
        let mut buf = vec![Complex64::default(); d];
        for start in (0..self.amplitudes.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = self.amplitudes[base + j * stride];
                }
                for i in 0..d {
                    self.amplitudes[base + i * stride] =
                        (0..d).map(|j| op[(i, j)] * buf[j]).sum();
                }
            }
        }
    }
}

/// Dense operator from `in_systems` to `out_systems` qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct LinOperator {
    pub dim: usize,
    pub in_systems: usize,
    pub out_systems: usize,
    pub matrix: DMatrix<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct OperatorDump {
    dim: usize,
    in_systems: usize,
    out_systems: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl Serialize for LinOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.matrix;
        OperatorDump {
            dim: self.dim,
            in_systems: self.in_systems,
            out_systems: self.out_systems,
            matrix: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dump = OperatorDump::deserialize(d)?;
        let rows = dump.dim.pow(dump.out_systems as u32);
        let cols = dump.dim.pow(dump.in_systems as u32);
        if dump.matrix.len() != rows || dump.matrix.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("operator shape does not match metadata"));
        }
        let matrix = DMatrix::from_fn(rows, cols, |i, j| {
            let [re, im] = dump.matrix[i][j];
            c(re, im)
        });
        Ok(LinOperator {
            dim: dump.dim,
            in_systems: dump.in_systems,
            out_systems: dump.out_systems,
            matrix,
        })
    }
}

impl LinOperator {
    pub fn local(dim: usize, matrix: DMatrix<Complex64>) -> Self {
        LinOperator {
            dim,
            in_systems: 1,
            out_systems: 1,
            matrix,
        }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let m = &self.matrix;
        if m.nrows() != m.ncols() {
            return false;
        }
        let prod = m.adjoint() * m;
        let id = DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
        (prod - id).iter().all(|z| z.norm() <= tol)
    }

    pub fn compose(&self, after: &LinOperator) -> LinOperator {
        LinOperator {
            dim: self.dim,
            in_systems: self.in_systems,
            out_systems: after.out_systems,
            matrix: &after.matrix * &self.matrix,
        }
    }
}

pub fn ghz_state(d: usize, n: usize) -> Result<StateVector> {
    ghz_state_bounded(d, n, DEFAULT_AMPLITUDE_BOUND)
}

/// `(1/√D) Σ_j |j...j⟩` on `n` systems.
pub fn ghz_state_bounded(d: usize, n: usize, bound: usize) -> Result<StateVector> {
    if d < 2 || n < 1 {
        return Err(Error::InvalidInput(format!("GHZ state needs D >= 2 and N >= 1, got D={d}, N={n}")));
    }
    let size = checked_size(d, n, bound)?;
    let mut amps = vec![Complex64::default(); size];
    let step = (size - 1) / (d - 1);
    let a = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        amps[j * step] = c(a, 0.0);
    }
    StateVector::new(d, n, amps)
}

/// `diag(1, e^{2πi t_1}, ..., e^{2πi t_{D-1}})`.
pub fn z_phase_gate(phase: &PhasePoint) -> LinOperator {
    let diag = phase.diagonal();
    let d = diag.len();
    LinOperator::local(d, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
}

/// Same as [`z_phase_gate`] with angles in radians.
pub fn z_phase_gate_radians(angles: &[f64]) -> LinOperator {
    let diag: Vec<Complex64> = std::iter::once(c(1.0, 0.0))
        .chain(angles.iter().map(|&b| Complex64::from_polar(1.0, b)))
        .collect();
    let d = diag.len();
    LinOperator::local(d, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
}

/// `|j⟩ ↦ |−j mod D⟩`.
pub fn antipode(d: usize) -> LinOperator {
    let m = DMatrix::from_fn(d, d, |i, j| {
        if i == (d - j) % d {
            c(1.0, 0.0)
        } else {
            Complex64::default()
        }
    });
    LinOperator::local(d, m)
}

/// Normalized Fourier vectors `|x_k⟩ = Σ_j ω^{jk} |j⟩ / √D`, the X-classical points.
pub fn x_basis(d: usize) -> Vec<Vec<Complex64>> {
    let s = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|k| (0..d).map(|j| omega(d, (j * k) as i64) * s).collect())
        .collect()
}

/// Basis measured by "apply Z-phase α, then measure X": vectors `P_α† |x_k⟩`.
pub fn phased_x_basis(phase: &PhasePoint) -> Vec<Vec<Complex64>> {
    let diag = phase.diagonal();
    x_basis(phase.dim())
        .into_iter()
        .map(|v| v.iter().zip(&diag).map(|(a, p)| p.conj() * a).collect())
        .collect()
}

/// Row `k` is `⟨x_k|`, so applying it reads out X-basis amplitudes.
pub(crate) fn x_readout(d: usize) -> DMatrix<Complex64> {
    let s = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d, d, |k, j| omega(d, -((j * k) as i64)) * s)
}
