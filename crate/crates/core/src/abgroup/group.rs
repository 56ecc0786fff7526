use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::intmat::{smith, IntMatrix};
use crate::error::{Error, Result};

/// Default cap on the number of elements an enumeration may produce.
pub const DEFAULT_ENUMERATION_BOUND: u128 = 1_000_000;

/// A finite abelian group `Z_{d_1} x ... x Z_{d_k}` given by its cyclic factors.
///
/// The factor list is kept as given; it need not be in invariant-factor form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupSpec")]
pub struct FinAbGroup {
    factors: Vec<u64>,
}

#[derive(Deserialize)]
struct GroupSpec {
    factors: Vec<u64>,
}

impl TryFrom<GroupSpec> for FinAbGroup {
    type Error = Error;

    fn try_from(spec: GroupSpec) -> Result<Self> {
        FinAbGroup::new(spec.factors)
    }
}

/// An element of a [`FinAbGroup`], as a residue vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub(crate) Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub(crate) fn to_i128(&self) -> Vec<i128> {
        self.0.iter().map(|&c| i128::from(c)).collect()
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

impl FinAbGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.contains(&0) {
            return Err(Error::InvalidInput(
                "cyclic factors must be positive".into(),
            ));
        }
        if factors.is_empty() {
            return Ok(FinAbGroup { factors: vec![1] });
        }
        Ok(FinAbGroup { factors })
    }

    pub fn cyclic(d: u64) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn trivial() -> Self {
        FinAbGroup { factors: vec![1] }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&d| u128::from(d)).product()
    }

    /// Least common multiple of the factors.
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |acc, &d| acc.lcm(&d))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Builds an element from arbitrary integers, reducing each coordinate.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::Arity {
                expected: self.rank(),
                got: coords.len(),
            });
        }
        Ok(GroupElement(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &d)| c.rem_euclid(d as i64) as u64)
                .collect(),
        ))
    }

    pub(crate) fn element_from_i128(&self, coords: &[i128]) -> GroupElement {
        GroupElement(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &d)| c.rem_euclid(i128::from(d)) as u64)
                .collect(),
        )
    }

    /// Generator of the `i`-th cyclic factor.
    pub fn basis_element(&self, i: usize) -> GroupElement {
        let mut e = self.zero();
        e.0[i] = 1 % self.factors[i];
        e
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.0.len() == self.rank() && g.0.iter().zip(&self.factors).all(|(&c, &d)| c < d)
    }

    pub(crate) fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::Domain(format!("{g} is not an element of {self}")))
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((&x, &y), &d)| ((u128::from(x) + u128::from(y)) % u128::from(d)) as u64)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &d)| (d - x) % d)
                .collect(),
        )
    }

    pub fn scale(&self, n: i64, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &d)| {
                    let d = i128::from(d);
                    (i128::from(n).rem_euclid(d) * i128::from(x) % d) as u64
                })
                .collect(),
        )
    }

    /// Additive order of an element.
    pub fn element_order(&self, a: &GroupElement) -> u64 {
        a.0.iter()
            .zip(&self.factors)
            .fold(1, |acc, (&x, &d)| acc.lcm(&(d / x.gcd(&d))))
    }

    /// Direct product `self x other`.
    pub fn product(&self, other: &FinAbGroup) -> FinAbGroup {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        FinAbGroup { factors }
    }

    /// `self^n`, i.e. `n`-indexed vectors with values in `self`.
    pub fn power(&self, n: usize) -> FinAbGroup {
        if n == 0 {
            return FinAbGroup::trivial();
        }
        let factors = (0..n).flat_map(|_| self.factors.iter().copied()).collect();
        FinAbGroup { factors }
    }

    /// Lists every element in mixed-radix order (last coordinate fastest).
    pub fn enumerate(&self, bound: u128) -> Result<Vec<GroupElement>> {
        let order = self.order();
        if order > bound {
            return Err(Error::resource("group enumeration", order, bound));
        }
        let mut out = Vec::with_capacity(order as usize);
        let mut cur = vec![0u64; self.rank()];
        for _ in 0..order {
            out.push(GroupElement(cur.clone()));
            for i in (0..self.rank()).rev() {
                cur[i] += 1;
                if cur[i] < self.factors[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
        Ok(out)
    }

    /// Position of an element in [`FinAbGroup::enumerate`] order.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.0.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&c, &d)| acc * d as usize + c as usize)
    }

    /// The isomorphic group in invariant-factor form `d_1 | d_2 | ...`
    /// (trivial factors dropped).
    pub fn invariant_factors(&self) -> Result<FinAbGroup> {
        let k = self.rank();
        let diag: IntMatrix = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { i128::from(self.factors[i]) } else { 0 })
                    .collect()
            })
            .collect();
        let sm = smith(&diag, k)?;
        let factors: Vec<u64> = sm
            .diag
            .iter()
            .filter(|&&d| d != 1)
            .map(|&d| d as u64)
            .collect();
        FinAbGroup::new(factors)
    }

    /// Projection onto the chosen factors (the quotient by the others).
    pub fn quotient_projection(&self, keep: &[usize], g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        keep.iter()
            .map(|&i| {
                g.0.get(i).copied().ok_or_else(|| {
                    Error::InvalidInput(format!("factor index {i} out of range"))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(GroupElement)
    }
}

impl std::fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z{d}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}
