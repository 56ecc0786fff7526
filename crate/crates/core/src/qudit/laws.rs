//! Numerical check of the algebraic laws of the canonical strongly
//! complementary pair on `C^D`: the copy structure Z of the computational
//! basis and the group-algebra structure X of `Z_D`, whose copyable states
//! are the (unnormalized) Fourier vectors.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::{c, StateVector};

type M = DMatrix<Complex64>;

fn one() -> Complex64 {
    c(1.0, 0.0)
}

fn id(n: usize) -> M {
    M::identity(n, n)
}

fn close(a: &M, b: &M, tol: f64) -> bool {
    a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() <= tol)
}

/// Permutation operator sending the system at position `i` to `perm[i]`.
pub fn permute_systems(d: usize, perm: &[usize]) -> M {
    let n = perm.len();
    let size = d.pow(n as u32);
    let mut m = M::zeros(size, size);
    for idx in 0..size {
        let mut digits = vec![0; n];
        let mut rest = idx;
        for slot in digits.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        let mut out = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            out[p] = digits[i];
        }
        let target = out.iter().fold(0, |acc, &x| acc * d + x);
        m[(target, idx)] = one();
    }
    m
}

/// A (candidate) dagger-Frobenius algebra on `C^D` given by its four maps.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusStructure {
    pub dim: usize,
    /// `D x D²`
    pub mult: M,
    /// `D x 1`
    pub unit: M,
    /// `D² x D`
    pub comult: M,
    /// `1 x D`
    pub counit: M,
}

impl FrobeniusStructure {
    /// Copying the computational basis: `δ|i⟩ = |ii⟩`.
    pub fn computational(d: usize) -> Self {
        let mut mult = M::zeros(d, d * d);
        for i in 0..d {
            mult[(i, i * d + i)] = one();
        }
        let unit = M::from_element(d, 1, one());
        Self::from_mult_unit(d, mult, unit)
    }

    /// Group algebra of `Z_D`: `μ|a,b⟩ = |a+b⟩`, unit `|0⟩`.
    pub fn fourier(d: usize) -> Self {
        let mut mult = M::zeros(d, d * d);
        for a in 0..d {
            for b in 0..d {
                mult[((a + b) % d, a * d + b)] = one();
            }
        }
        let mut unit = M::zeros(d, 1);
        unit[(0, 0)] = one();
        Self::from_mult_unit(d, mult, unit)
    }

    fn from_mult_unit(dim: usize, mult: M, unit: M) -> Self {
        FrobeniusStructure {
            dim,
            comult: mult.adjoint(),
            counit: unit.adjoint(),
            mult,
            unit,
        }
    }

    pub fn frobenius_holds(&self, tol: f64) -> bool {
        let d = self.dim;
        let i = id(d);
        let (mu, eta, delta, eps) = (&self.mult, &self.unit, &self.comult, &self.counit);
        let assoc = close(&(mu * mu.kronecker(&i)), &(mu * i.kronecker(mu)), tol);
        let unital = close(&(mu * eta.kronecker(&i)), &i, tol) && close(&(mu * i.kronecker(eta)), &i, tol);
        let coassoc = close(&(delta.kronecker(&i) * delta), &(i.kronecker(delta) * delta), tol);
        let counital =
            close(&(eps.kronecker(&i) * delta), &i, tol) && close(&(i.kronecker(eps) * delta), &i, tol);
        let mid = delta * mu;
        let frob = close(&(mu.kronecker(&i) * i.kronecker(delta)), &mid, tol)
            && close(&(i.kronecker(mu) * delta.kronecker(&i)), &mid, tol);
        let dagger = close(delta, &mu.adjoint(), tol) && close(eps, &eta.adjoint(), tol);
        assoc && unital && coassoc && counital && frob && dagger
    }

    pub fn is_commutative(&self, tol: f64) -> bool {
        close(&(&self.mult * permute_systems(self.dim, &[1, 0])), &self.mult, tol)
    }

    /// `N` with `μ ∘ δ = N·1`, if it exists and is nonzero.
    pub fn quasi_special_scalar(&self, tol: f64) -> Option<f64> {
        let md = &self.mult * &self.comult;
        let n = md[(0, 0)];
        let ok = close(&md, &(id(self.dim) * n), tol) && n.im.abs() <= tol && n.re.abs() > tol;
        ok.then_some(n.re)
    }

    /// States `ψ ≠ 0` with `δψ = ψ ⊗ ψ`.
    ///
    /// Candidates are eigenvectors of a generic Hermitian combination of the
    /// operators `(v† ⊗ 1) δ`, which are simultaneously diagonal in the
    /// copyable basis; each candidate is then verified.
    pub fn copyables(&self, tol: f64) -> Vec<StateVector> {
        let d = self.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let v = M::from_fn(d, 1, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let a = v.adjoint().kronecker(&id(d)) * &self.comult;
        let herm = (&a + a.adjoint()) + (&a - a.adjoint()) * c(0.0, 0.7321);
        let eig = SymmetricEigen::new(herm);
        let mut out = Vec::new();
        for k in 0..d {
            let e = M::from_column_slice(d, 1, eig.eigenvectors.column(k).as_slice());
            let de = &self.comult * &e;
            let ee = e.kronecker(&e);
            let lambda: Complex64 = ee.iter().zip(de.iter()).map(|(x, y)| x.conj() * y).sum();
            let psi = &e * lambda;
            if lambda.norm() > tol && close(&(&self.comult * &psi), &psi.kronecker(&psi), tol * 10.0) {
                out.push(StateVector {
                    dim: d,
                    systems: 1,
                    amplitudes: psi.iter().copied().collect(),
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservablePair {
    pub z: FrobeniusStructure,
    pub x: FrobeniusStructure,
}

impl ObservablePair {
    pub fn canonical(d: usize) -> Self {
        ObservablePair {
            z: FrobeniusStructure::computational(d),
            x: FrobeniusStructure::fourier(d),
        }
    }

    /// Negative control: the X comultiplication is perturbed so the
    /// Frobenius and dagger laws break.
    pub fn with_corrupted_x_comult(d: usize) -> Self {
        let mut p = Self::canonical(d);
        p.x.comult[(0, 0)] += one();
        p
    }

    pub fn dim(&self) -> usize {
        self.z.dim
    }

    /// Both bialgebra laws `δ_Z μ_X = (μ_X⊗μ_X)(1⊗σ⊗1)(δ_Z⊗δ_Z)` and the
    /// same with Z and X exchanged.
    pub fn bialgebra_holds(&self, tol: f64) -> bool {
        let mid = permute_systems(self.dim(), &[0, 2, 1, 3]);
        let law = |a: &FrobeniusStructure, b: &FrobeniusStructure| {
            let lhs = &a.comult * &b.mult;
            let rhs = b.mult.kronecker(&b.mult) * &mid * a.comult.kronecker(&a.comult);
            close(&lhs, &rhs, tol)
        };
        law(&self.z, &self.x) && law(&self.x, &self.z)
    }

    /// Units are copied by the other comultiplication, counits absorb the
    /// other multiplication, and the unit–counit scalars are 1.
    pub fn coherence_holds(&self, tol: f64) -> bool {
        let law = |a: &FrobeniusStructure, b: &FrobeniusStructure| {
            close(&(&a.counit * &b.mult), &a.counit.kronecker(&a.counit), tol)
                && close(&(&a.comult * &b.unit), &b.unit.kronecker(&b.unit), tol)
                && ((&a.counit * &b.unit)[(0, 0)] - one()).norm() <= tol
        };
        law(&self.z, &self.x) && law(&self.x, &self.z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureLaws {
    pub frobenius_ok: bool,
    pub commutative_ok: bool,
    pub quasi_special_scalar: Option<f64>,
    pub copyables: Vec<StateVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub dim: usize,
    pub z: StructureLaws,
    pub x: StructureLaws,
    pub frobenius_ok: bool,
    /// The X structure's scalar (equal to `D` for the canonical pair).
    pub quasi_special_scalar: Option<f64>,
    pub bialgebra_ok: bool,
    pub coherence_ok: bool,
    pub tol: f64,
}

impl LawReport {
    pub fn all_hold(&self) -> bool {
        self.frobenius_ok
            && self.z.quasi_special_scalar.is_some()
            && self.quasi_special_scalar.is_some()
            && self.bialgebra_ok
            && self.coherence_ok
            && self.z.copyables.len() == self.dim
            && self.x.copyables.len() == self.dim
    }
}

fn structure_laws(s: &FrobeniusStructure, tol: f64) -> StructureLaws {
    StructureLaws {
        frobenius_ok: s.frobenius_holds(tol),
        commutative_ok: s.is_commutative(tol),
        quasi_special_scalar: s.quasi_special_scalar(tol),
        copyables: s.copyables(tol),
    }
}

pub fn verify_laws(pair: &ObservablePair, tol: f64) -> LawReport {
    let z = structure_laws(&pair.z, tol);
    let x = structure_laws(&pair.x, tol);
    LawReport {
        dim: pair.dim(),
        frobenius_ok: z.frobenius_ok && x.frobenius_ok,
        quasi_special_scalar: x.quasi_special_scalar,
        bialgebra_ok: pair.bialgebra_holds(tol),
        coherence_ok: pair.coherence_holds(tol),
        z,
        x,
        tol,
    }
}

/// Whether a local operator is a Z-phase: `U = μ_Z (ψ ⊗ 1)` for the state
/// `ψ = U η_Z` with unimodular entries and `ψ_0 = 1`.
pub fn is_z_phase(op: &M, tol: f64) -> bool {
    let d = op.nrows();
    let z = FrobeniusStructure::computational(d);
    let psi = op * &z.unit;
    let unimodular = psi.iter().all(|a| (a.norm() - 1.0).abs() <= tol);
    unimodular && (psi[(0, 0)] - one()).norm() <= tol && close(&(&z.mult * psi.kronecker(&id(d))), op, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::PhasePoint;
    use crate::qudit::state::{x_basis, z_phase_gate};
    use crate::DEFAULT_TOL;
    use num_rational::Ratio;

    #[test]
    fn qubit_pair() {
        let r = verify_laws(&ObservablePair::canonical(2), DEFAULT_TOL);
        assert!(r.all_hold(), "{r:?}");
        assert_eq!(r.quasi_special_scalar, Some(2.0));
        assert_eq!(r.z.quasi_special_scalar, Some(1.0));
        // X copyables are √2|±⟩ up to order
        let plus = x_basis(2);
        for psi in &r.x.copyables {
            let hits = plus.iter().any(|v| {
                let ip: Complex64 = v.iter().zip(&psi.amplitudes).map(|(a, b)| a.conj() * b).sum();
                (ip.norm() - 2f64.sqrt()).abs() < 1e-9
            });
            assert!(hits);
        }
    }

    #[test]
    fn qutrit_pair() {
        let r = verify_laws(&ObservablePair::canonical(3), DEFAULT_TOL);
        assert!(r.all_hold());
        assert!((r.quasi_special_scalar.unwrap() - 3.0).abs() < DEFAULT_TOL);
    }

    #[test]
    fn corrupted_comultiplication_fails() {
        let r = verify_laws(&ObservablePair::with_corrupted_x_comult(2), DEFAULT_TOL);
        assert!(!r.frobenius_ok);
        assert!(!r.all_hold());
    }

    #[test]
    fn phase_gates_are_z_phases() {
        let g = z_phase_gate(&PhasePoint::new(vec![Ratio::new(1, 9), Ratio::new(8, 9)]));
        assert!(is_z_phase(&g.matrix, DEFAULT_TOL));
        let x = crate::qudit::state::x_readout(3);
        assert!(!is_z_phase(&x, DEFAULT_TOL));
    }

    #[test]
    fn permutation_swaps() {
        let s = permute_systems(2, &[1, 0]);
        // |01⟩ ↦ |10⟩
        assert_eq!(s[(2, 1)], one());
        assert_eq!(s[(0, 0)], one());
    }
}
