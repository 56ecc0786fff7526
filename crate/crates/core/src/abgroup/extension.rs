//! Deciding whether `G` is a trivial algebraic extension of a subgroup `H`.
//!
//! Any finite system reduces, through Smith normal form of its coefficient
//! matrix, to diagonal equations `d * y = r`. The decision used here is the
//! purity test: `G` is trivial over `H` iff `H ∩ dG = dH` for every divisor
//! `d` of `exp(G)`. A failing `d` yields the one-equation witness `d x = h`
//! with `h ∈ (H ∩ dG) \ dH`.
//!
//! This reduction is validated against an exhaustive system search on all
//! groups of order at most 16 (see the crate's integration tests); it is not
//! taken as given beyond that.

use serde::{Deserialize, Serialize};

use super::group::{FinAbGroup, GroupElement};
use super::subgroup::{Subgroup, ENUMERATION_FALLBACK_ORDER};
use super::system::{solve_system, EqSystem, SolutionSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionWitness {
    /// System with right-hand sides in `H`, solvable in `G` but not in `H`.
    pub system: EqSystem,
    /// A solution in `G`.
    pub solution: Vec<GroupElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionVerdict {
    pub trivial: bool,
    pub witness: Option<ExtensionWitness>,
    pub checked_divisors: Vec<u64>,
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i * i != n {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn is_trivial_extension(g: &FinAbGroup, h: &Subgroup) -> Result<ExtensionVerdict> {
    if h.ambient() != g {
        return Err(Error::Domain(format!(
            "subgroup lives in {} rather than {g}",
            h.ambient()
        )));
    }
    let whole = Subgroup::whole(g);
    let mut checked = Vec::new();
    for d in divisors(g.exponent()).into_iter().filter(|&d| d > 1) {
        checked.push(d);
        let dg = whole.multiple(d as i64);
        let dh = h.multiple(d as i64);
        let meet = h.intersection(&dg)?;
        if meet.is_subgroup_of(&dh) {
            continue;
        }
        let rhs = if meet.order() <= ENUMERATION_FALLBACK_ORDER {
            meet.elements(ENUMERATION_FALLBACK_ORDER)?
                .into_iter()
                .find(|x| !dh.contains(x))
        } else {
            meet.generators().iter().find(|x| !dh.contains(x)).cloned()
        }
        .expect("H ∩ dG is not contained in dH");
        let system = EqSystem::single(d as i64, rhs);
        let solution = match solve_system(g, &system, &whole)? {
            SolutionSet::Solvable { witness, .. } => witness,
            SolutionSet::Empty { .. } => {
                return Err(Error::Domain(
                    "witness right-hand side is not in dG".into(),
                ))
            }
        };
        return Ok(ExtensionVerdict {
            trivial: false,
            witness: Some(ExtensionWitness { system, solution }),
            checked_divisors: checked,
        });
    }
    Ok(ExtensionVerdict {
        trivial: true,
        witness: None,
        checked_divisors: checked,
    })
}

/// Checks whether `phi` is a homomorphism `G -> H` fixing `H` pointwise,
/// which makes every `G`-solution map to an `H`-solution.
///
/// Errors if some image leaves `H`.
pub fn retraction_implies_trivial<F>(
    g: &FinAbGroup,
    h: &Subgroup,
    phi: F,
    bound: u128,
) -> Result<bool>
where
    F: Fn(&GroupElement) -> GroupElement,
{
    let images: Vec<GroupElement> = (0..g.rank()).map(|i| phi(&g.basis_element(i))).collect();
    let mut homomorphic = images
        .iter()
        .zip(g.factors())
        .all(|(img, &d)| g.scale(d as i64, img).is_zero());
    for x in g.enumerate(bound)? {
        let y = phi(&x);
        if !h.contains(&y) {
            return Err(Error::InvalidRetraction(format!(
                "image of {x} is {y}, outside H"
            )));
        }
        if homomorphic {
            let linear = x
                .coords()
                .iter()
                .zip(&images)
                .fold(g.zero(), |acc, (&c, img)| g.add(&acc, &g.scale(c as i64, img)));
            homomorphic = linear == y;
        }
    }
    if !homomorphic {
        return Ok(false);
    }
    Ok(h.elements(bound)?.iter().all(|x| &phi(x) == x))
}

/// `x ↦ (π_K x, 0)`: keeps the listed factors, zeroes the rest.
pub fn factor_retraction(keep: &[usize]) -> impl Fn(&GroupElement) -> GroupElement + '_ {
    move |x| {
        GroupElement(
            x.0.iter()
                .enumerate()
                .map(|(i, &c)| if keep.contains(&i) { c } else { 0 })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::DEFAULT_ENUMERATION_BOUND;

    fn sub(g: &FinAbGroup, gens: &[&[i64]]) -> Subgroup {
        Subgroup::new(g, gens.iter().map(|c| g.element(c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn z4_over_two_z4_is_non_trivial() {
        let g = FinAbGroup::cyclic(4).unwrap();
        let h = sub(&g, &[&[2]]);
        let v = is_trivial_extension(&g, &h).unwrap();
        assert!(!v.trivial);
        let w = v.witness.unwrap();
        assert_eq!(w.system.to_string(), "2x=2");
        assert!(w.system.is_satisfied_by(&g, &w.solution));
        assert_eq!(v.checked_divisors, vec![2]);
    }

    #[test]
    fn z8_over_four_z8_witness() {
        let g = FinAbGroup::cyclic(8).unwrap();
        let h = sub(&g, &[&[4]]);
        let v = is_trivial_extension(&g, &h).unwrap();
        assert!(!v.trivial);
        assert_eq!(v.witness.unwrap().system.to_string(), "2x=4");
    }

    #[test]
    fn product_over_factor_is_trivial() {
        for d in [2, 3] {
            let g = FinAbGroup::new(vec![d, d]).unwrap();
            let h = sub(&g, &[&[1, 0]]);
            assert!(is_trivial_extension(&g, &h).unwrap().trivial);
        }
    }

    #[test]
    fn whole_group_is_trivial_over_itself() {
        for f in [vec![1], vec![4], vec![2, 4], vec![3, 9]] {
            let g = FinAbGroup::new(f).unwrap();
            assert!(is_trivial_extension(&g, &Subgroup::whole(&g)).unwrap().trivial);
        }
    }

    #[test]
    fn foreign_subgroup_is_domain_error() {
        let g = FinAbGroup::cyclic(4).unwrap();
        let other = FinAbGroup::cyclic(8).unwrap();
        let h = Subgroup::whole(&other);
        assert!(matches!(is_trivial_extension(&g, &h), Err(Error::Domain(_))));
    }

    #[test]
    fn retractions() {
        // K x K' onto K x {0}
        let g = FinAbGroup::new(vec![3, 2]).unwrap();
        let h = sub(&g, &[&[1, 0]]);
        let keep = [0usize];
        assert!(retraction_implies_trivial(&g, &h, factor_retraction(&keep), DEFAULT_ENUMERATION_BOUND).unwrap());
        assert!(is_trivial_extension(&g, &h).unwrap().trivial);

        // x -> 2x on Z4 does not fix {0,2}
        let z4 = FinAbGroup::cyclic(4).unwrap();
        let h = sub(&z4, &[&[2]]);
        let doubling = |x: &GroupElement| z4.scale(2, x);
        assert!(!retraction_implies_trivial(&z4, &h, doubling, 100).unwrap());

        // identity on G = H
        let whole = Subgroup::whole(&z4);
        assert!(retraction_implies_trivial(&z4, &whole, |x: &GroupElement| x.clone(), 100).unwrap());

        // identity on Z4 leaves {0,2}
        let err = retraction_implies_trivial(&z4, &h, |x: &GroupElement| x.clone(), 100).unwrap_err();
        assert!(matches!(err, Error::InvalidRetraction(_)));
    }

    #[test]
    fn divisor_list() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(16), vec![1, 2, 4, 8, 16]);
    }
}
