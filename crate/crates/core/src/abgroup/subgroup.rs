use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::group::{FinAbGroup, GroupElement};
use super::intmat::{solve_integer, Lattice};
use crate::error::{Error, Result};

/// Below this order, membership is answered from an explicit element set.
pub const ENUMERATION_FALLBACK_ORDER: u128 = 10_000;

/// Serialized subgroup: `{"generators":[[...],...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub generators: Vec<Vec<i64>>,
}

/// Subgroup of a finite abelian group, given by generators.
///
/// The generators are lifted to a lattice `L = span(gens) + diag(d) Z^k`
/// kept in Hermite form, so membership is a triangular solve.
#[derive(Debug, Clone)]
pub struct Subgroup {
    ambient: FinAbGroup,
    generators: Vec<GroupElement>,
    lattice: Lattice,
    members: Option<HashSet<GroupElement>>,
}

impl Subgroup {
    pub fn new(ambient: &FinAbGroup, generators: Vec<GroupElement>) -> Result<Self> {
        for g in &generators {
            ambient.check(g)?;
        }
        let mut lattice = Lattice::diagonal(ambient.factors());
        for g in &generators {
            lattice.insert(&g.to_i128())?;
        }
        let order = ambient.order() / lattice.covolume();
        let members = if order <= ENUMERATION_FALLBACK_ORDER {
            Some(closure(ambient, &generators).into_iter().collect())
        } else {
            None
        };
        Ok(Subgroup {
            ambient: ambient.clone(),
            generators,
            lattice,
            members,
        })
    }

    pub fn from_spec(ambient: &FinAbGroup, spec: &SubgroupSpec) -> Result<Self> {
        let gens = spec
            .generators
            .iter()
            .map(|g| ambient.element(g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ambient, gens)
    }

    pub fn spec(&self) -> SubgroupSpec {
        SubgroupSpec {
            generators: self
                .generators
                .iter()
                .map(|g| g.0.iter().map(|&c| c as i64).collect())
                .collect(),
        }
    }

    pub fn whole(ambient: &FinAbGroup) -> Self {
        let gens = (0..ambient.rank()).map(|i| ambient.basis_element(i)).collect();
        Self::new(ambient, gens).expect("basis elements are valid")
    }

    pub fn trivial(ambient: &FinAbGroup) -> Self {
        Self::new(ambient, Vec::new()).expect("empty generator list is valid")
    }

    pub fn ambient(&self) -> &FinAbGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Hermite basis of the lifted lattice, used for parametrizing elements.
    pub(crate) fn lattice_basis(&self) -> &Vec<Vec<i128>> {
        self.lattice.basis()
    }

    pub fn order(&self) -> u128 {
        self.ambient.order() / self.lattice.covolume()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        if !self.ambient.contains(g) {
            return false;
        }
        match &self.members {
            Some(set) => set.contains(g),
            None => self.lattice.contains(&g.to_i128()),
        }
    }

    /// Elements in ambient enumeration order.
    pub fn elements(&self, bound: u128) -> Result<Vec<GroupElement>> {
        let order = self.order();
        if order > bound {
            return Err(Error::resource("subgroup enumeration", order, bound));
        }
        let mut els: Vec<GroupElement> = match &self.members {
            Some(set) => set.iter().cloned().collect(),
            None => closure(&self.ambient, &self.generators),
        };
        els.sort_by_key(|e| self.ambient.index_of(e));
        Ok(els)
    }

    /// `n H`, the image of multiplication by `n`.
    pub fn multiple(&self, n: i64) -> Subgroup {
        let gens = self
            .generators
            .iter()
            .map(|g| self.ambient.scale(n, g))
            .collect();
        Subgroup::new(&self.ambient, gens).expect("multiples stay in the ambient group")
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.ambient == other.ambient && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn same_as(&self, other: &Subgroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }

    /// Intersection, computed from the integer kernel of `[B1^T | -B2^T]`.
    pub fn intersection(&self, other: &Subgroup) -> Result<Subgroup> {
        if self.ambient != other.ambient {
            return Err(Error::Domain("subgroups of different groups".into()));
        }
        let b1 = self.lattice.basis();
        let b2 = other.lattice.basis();
        let k = b1.len();
        let system: Vec<Vec<i128>> = (0..k)
            .map(|c| {
                (0..k)
                    .map(|i| b1[i][c])
                    .chain((0..k).map(|i| -b2[i][c]))
                    .collect()
            })
            .collect();
        let sol = solve_integer(&system, 2 * k, &vec![0; k])?
            .map_err(|_| Error::Domain("homogeneous system reported unsolvable".into()))?;
        let gens = sol
            .kernel
            .iter()
            .map(|w| {
                let v: Vec<i128> = (0..k)
                    .map(|c| (0..k).map(|i| w[i] * b1[i][c]).sum())
                    .collect();
                self.ambient.element_from_i128(&v)
            })
            .filter(|g| !g.is_zero())
            .collect();
        Subgroup::new(&self.ambient, gens)
    }
}

fn closure(ambient: &FinAbGroup, gens: &[GroupElement]) -> Vec<GroupElement> {
    let mut seen: HashSet<GroupElement> = HashSet::new();
    let mut queue = VecDeque::new();
    let zero = ambient.zero();
    seen.insert(zero.clone());
    queue.push_back(zero);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = ambient.add(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().collect()
}
