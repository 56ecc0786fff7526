//! Finite sets and relations: groupoid algebras, strong complementarity
//! checked as exact relational identities, phase groups, and the locality
//! check for the product-form pairs `(⊕_h G, ⊕_g H)`.

mod relation;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abgroup::{is_trivial_extension, ExtensionVerdict, FinAbGroup, GroupElement, Subgroup};
use crate::error::{Error, Result};

pub use relation::Relation;

/// Largest carrier `|G|·|H|` that [`build_sc_pair`] accepts by default.
pub const DEFAULT_CARRIER_BOUND: usize = 64;

/// Phase enumeration scans every subset of the carrier, so it is capped
/// separately.
pub const PHASE_SCAN_CARRIER_BOUND: usize = 20;

/// A dagger-Frobenius algebra on a finite set, as four relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidAlgebra {
    pub carrier: usize,
    pub mult: Relation,
    pub unit: Relation,
    pub comult: Relation,
    pub counit: Relation,
}

impl GroupoidAlgebra {
    /// Builds the algebra from a partial multiplication on `0..carrier` and
    /// its set of identities; the comonoid is the dagger.
    fn from_partial(
        carrier: usize,
        product: impl Fn(usize, usize) -> Option<usize>,
        identities: impl IntoIterator<Item = usize>,
    ) -> Self {
        let mut pairs = Vec::new();
        for a in 0..carrier {
            for b in 0..carrier {
                if let Some(c) = product(a, b) {
                    pairs.push((a * carrier + b, c));
                }
            }
        }
        let mult = Relation::new(carrier * carrier, carrier, pairs).expect("in range");
        let unit = Relation::state(carrier, identities);
        GroupoidAlgebra {
            carrier,
            comult: mult.dagger(),
            counit: unit.dagger(),
            mult,
            unit,
        }
    }

    fn id(&self) -> Relation {
        Relation::identity(self.carrier)
    }

    pub fn associative(&self) -> bool {
        let id = self.id();
        self.mult.tensor(&id).then(&self.mult) == id.tensor(&self.mult).then(&self.mult)
    }

    pub fn unital(&self) -> bool {
        let id = self.id();
        self.unit.tensor(&id).then(&self.mult) == id && id.tensor(&self.unit).then(&self.mult) == id
    }

    pub fn coassociative(&self) -> bool {
        let id = self.id();
        self.comult.then(&self.comult.tensor(&id)) == self.comult.then(&id.tensor(&self.comult))
    }

    pub fn counital(&self) -> bool {
        let id = self.id();
        self.comult.then(&self.counit.tensor(&id)) == id
            && self.comult.then(&id.tensor(&self.counit)) == id
    }

    /// `(1⊗μ)(δ⊗1) = δμ = (μ⊗1)(1⊗δ)`.
    pub fn frobenius_law(&self) -> bool {
        let id = self.id();
        let middle = self.mult.then(&self.comult);
        let left = self.comult.tensor(&id).then(&id.tensor(&self.mult));
        let right = id.tensor(&self.comult).then(&self.mult.tensor(&id));
        left == middle && right == middle
    }

    pub fn is_dagger(&self) -> bool {
        self.comult == self.mult.dagger() && self.counit == self.unit.dagger()
    }

    pub fn frobenius_holds(&self) -> bool {
        self.associative()
            && self.unital()
            && self.coassociative()
            && self.counital()
            && self.frobenius_law()
            && self.is_dagger()
    }

    /// `μδ = id`.
    pub fn quasi_special(&self) -> bool {
        self.comult.then(&self.mult) == self.id()
    }

    pub fn is_commutative(&self) -> bool {
        Relation::permutation(self.carrier, &[1, 0]).then(&self.mult) == self.mult
    }

    /// Transpose of a state through the cup `δη`: `{(-g, h)}` for Z.
    fn conjugate(&self, state: &Relation) -> Relation {
        let cup = self.unit.then(&self.comult);
        cup.then(&state.dagger().tensor(&self.id()))
    }
}

/// A candidate strongly complementary pair on the carrier `G × H`, with
/// element `(g, h)` at index `g_idx·|H| + h_idx`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelPair {
    #[serde(rename = "G")]
    pub g: FinAbGroup,
    #[serde(rename = "H")]
    pub h: FinAbGroup,
    pub z: GroupoidAlgebra,
    pub x: GroupoidAlgebra,
}

/// Builds `Z = ⊕_{h∈H} G` and `X = ⊕_{g∈G} H` on `G × H`.
pub fn build_sc_pair(g: &FinAbGroup, h: &FinAbGroup) -> Result<RelPair> {
    build_sc_pair_bounded(g, h, DEFAULT_CARRIER_BOUND)
}

pub fn build_sc_pair_bounded(g: &FinAbGroup, h: &FinAbGroup, bound: usize) -> Result<RelPair> {
    let carrier = g.order().saturating_mul(h.order());
    if carrier > bound as u128 {
        return Err(Error::resource("relational carrier", carrier, bound as u128));
    }
    let gs = g.enumerate(bound as u128)?;
    let hs = h.enumerate(bound as u128)?;
    let nh = hs.len();
    let n = carrier as usize;
    let split = |i: usize| (&gs[i / nh], &hs[i % nh]);
    let join = |a: &GroupElement, b: &GroupElement| g.index_of(a) * nh + h.index_of(b);

    let z = GroupoidAlgebra::from_partial(
        n,
        |a, b| {
            let ((g1, h1), (g2, h2)) = (split(a), split(b));
            (h1 == h2).then(|| join(&g.add(g1, g2), h1))
        },
        hs.iter().map(|e| join(&g.zero(), e)).collect::<Vec<_>>(),
    );
    let x = GroupoidAlgebra::from_partial(
        n,
        |a, b| {
            let ((g1, h1), (g2, h2)) = (split(a), split(b));
            (g1 == g2).then(|| join(g1, &h.add(h1, h2)))
        },
        gs.iter().map(|e| join(e, &h.zero())).collect::<Vec<_>>(),
    );
    Ok(RelPair {
        g: g.clone(),
        h: h.clone(),
        z,
        x,
    })
}

impl RelPair {
    pub fn carrier(&self) -> usize {
        self.z.carrier
    }

    /// Negative control: drops one pair from the X comultiplication.
    pub fn with_corrupted_x_comult(mut self) -> Self {
        let first = *self.x.comult.pairs().iter().next().expect("non-empty comult");
        let rest = self.x.comult.pairs().iter().copied().filter(|p| *p != first);
        self.x.comult = Relation::new(self.x.comult.source, self.x.comult.target, rest.collect::<Vec<_>>())
            .expect("in range");
        self
    }

    /// Negative control: uses the Z structure for both observables.
    pub fn degenerate(mut self) -> Self {
        self.x = self.z.clone();
        self
    }
}

/// `δ_A μ_B = (μ_B⊗μ_B)(1⊗σ⊗1)(δ_A⊗δ_A)`.
fn bialgebra_one_way(a: &GroupoidAlgebra, b: &GroupoidAlgebra) -> bool {
    let lhs = b.mult.then(&a.comult);
    let perm = Relation::permutation(a.carrier, &[0, 2, 1, 3]);
    let rhs = a.comult.tensor(&a.comult).then(&perm).then(&b.mult.tensor(&b.mult));
    lhs == rhs
}

/// Counit/unit coherence of `a` against `b`: `ε_A μ_B = ε_A⊗ε_A`,
/// `δ_A η_B = η_B⊗η_B`, and `ε_A η_B` is the identity scalar.
fn coherence_one_way(a: &GroupoidAlgebra, b: &GroupoidAlgebra) -> bool {
    b.mult.then(&a.counit) == a.counit.tensor(&a.counit)
        && b.unit.then(&a.comult) == b.unit.tensor(&b.unit)
        && b.unit.then(&a.counit) == Relation::identity(1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelStructureLaws {
    pub frobenius_ok: bool,
    pub quasi_special_ok: bool,
    pub commutative_ok: bool,
}

impl RelStructureLaws {
    fn of(a: &GroupoidAlgebra) -> Self {
        RelStructureLaws {
            frobenius_ok: a.frobenius_holds(),
            quasi_special_ok: a.quasi_special(),
            commutative_ok: a.is_commutative(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelLawReport {
    #[serde(rename = "G")]
    pub g: Vec<u64>,
    #[serde(rename = "H")]
    pub h: Vec<u64>,
    pub carrier: usize,
    pub z: RelStructureLaws,
    pub x: RelStructureLaws,
    pub bialgebra_ok: bool,
    pub coherence_ok: bool,
}

impl RelLawReport {
    pub fn all_hold(&self) -> bool {
        self.z.frobenius_ok
            && self.z.quasi_special_ok
            && self.x.frobenius_ok
            && self.x.quasi_special_ok
            && self.bialgebra_ok
            && self.coherence_ok
    }
}

pub fn verify_rel_laws(pair: &RelPair) -> RelLawReport {
    let (z, x) = (&pair.z, &pair.x);
    let ((zl, xl), (bialgebra_ok, coherence_ok)) = rayon::join(
        || rayon::join(|| RelStructureLaws::of(z), || RelStructureLaws::of(x)),
        || {
            rayon::join(
                || bialgebra_one_way(z, x) && bialgebra_one_way(x, z),
                || coherence_one_way(z, x) && coherence_one_way(x, z),
            )
        },
    );
    RelLawReport {
        g: pair.g.factors().to_vec(),
        h: pair.h.factors().to_vec(),
        carrier: pair.carrier(),
        z: zl,
        x: xl,
        bialgebra_ok,
        coherence_ok,
    }
}

/// Z-phases of a pair as `H`-indexed vectors in `G`, with the classical
/// points (the X-copyable states) among them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelPhaseGroup {
    #[serde(rename = "G")]
    pub g: FinAbGroup,
    #[serde(rename = "H")]
    pub h: FinAbGroup,
    pub phases: Vec<Vec<GroupElement>>,
    pub classical: Vec<Vec<GroupElement>>,
}

impl RelPhaseGroup {
    /// The abstract group `G^|H|`.
    pub fn group(&self) -> Result<FinAbGroup> {
        let n = usize::try_from(self.h.order()).map_err(|_| Error::Overflow("phase group"))?;
        Ok(self.g.power(n))
    }

    fn flatten(v: &[GroupElement]) -> GroupElement {
        GroupElement(v.iter().flat_map(|e| e.coords().iter().copied()).collect())
    }

    /// Closed under pointwise addition in `G`.
    pub fn is_closed(&self) -> bool {
        let set: std::collections::BTreeSet<_> = self.phases.iter().collect();
        self.phases.iter().all(|a| {
            self.phases.iter().all(|b| {
                let sum: Vec<_> = a.iter().zip(b).map(|(x, y)| self.g.add(x, y)).collect();
                set.contains(&sum)
            })
        })
    }

    /// The classical points, as a subgroup of [`RelPhaseGroup::group`].
    pub fn classical_subgroup(&self) -> Result<Subgroup> {
        let ambient = self.group()?;
        Subgroup::new(&ambient, self.classical.iter().map(|v| Self::flatten(v)).collect())
    }
}

fn subset_state(carrier: usize, mask: u64) -> Relation {
    Relation::state(carrier, (0..carrier).filter(|&i| mask >> i & 1 == 1))
}

/// Enumerates Z-phase states and X-classical points by scanning every
/// subset of the carrier against their relational defining equations.
pub fn rel_phases(pair: &RelPair) -> Result<RelPhaseGroup> {
    let n = pair.carrier();
    if n > PHASE_SCAN_CARRIER_BOUND {
        return Err(Error::resource(
            "phase subset scan",
            1u128 << n.min(127),
            1u128 << PHASE_SCAN_CARRIER_BOUND,
        ));
    }
    let gs = pair.g.enumerate(n as u128)?;
    let hs = pair.h.enumerate(n as u128)?;
    let nh = hs.len();
    let z = &pair.z;
    let x = &pair.x;
    let z_unit = z.unit.clone();

    let hits: Vec<(u64, bool, bool)> = (1..(1u64 << n))
        .into_par_iter()
        .map(|mask| {
            let s = subset_state(n, mask);
            let phase = z.conjugate(&s).tensor(&s).then(&z.mult) == z_unit;
            let classical = s.then(&x.comult) == s.tensor(&s);
            (mask, phase, classical)
        })
        .filter(|&(_, p, c)| p || c)
        .collect();

    let as_vector = |mask: u64| -> Result<Vec<GroupElement>> {
        let mut v: Vec<Option<GroupElement>> = vec![None; nh];
        for i in (0..n).filter(|&i| mask >> i & 1 == 1) {
            let slot = &mut v[i % nh];
            if slot.is_some() {
                return Err(Error::Domain("state is not a section over H".into()));
            }
            *slot = Some(gs[i / nh].clone());
        }
        v.into_iter()
            .map(|e| e.ok_or_else(|| Error::Domain("state misses a component".into())))
            .collect()
    };
    let mut phases = Vec::new();
    let mut classical = Vec::new();
    for &(mask, p, c) in &hits {
        if p {
            phases.push(as_vector(mask)?);
        }
        if c {
            classical.push(as_vector(mask)?);
        }
    }
    phases.sort();
    classical.sort();
    Ok(RelPhaseGroup {
        g: pair.g.clone(),
        h: pair.h.clone(),
        phases,
        classical,
    })
}

/// Decides Mermin locality for the pair on `G × H`: the phase group `G^H`
/// must be a trivial extension of its constant vectors.
pub fn frel_locality_check(g: &FinAbGroup, h: &FinAbGroup) -> Result<ExtensionVerdict> {
    let carrier = g.order().saturating_mul(h.order());
    if carrier > DEFAULT_CARRIER_BOUND as u128 {
        return Err(Error::resource("relational carrier", carrier, DEFAULT_CARRIER_BOUND as u128));
    }
    let copies = h.order() as usize;
    let ambient = g.power(copies);
    let diagonal = (0..g.rank())
        .map(|i| {
            let e = g.basis_element(i);
            GroupElement(e.coords().repeat(copies))
        })
        .collect();
    let constant = Subgroup::new(&ambient, diagonal)?;
    is_trivial_extension(&ambient, &constant)
}
