//! Finite abelian groups, subgroups, integer-linear systems over them, and
//! the trivial/non-trivial algebraic extension decision.

mod extension;
mod group;
pub(crate) mod intmat;
mod subgroup;
mod system;

pub use extension::{
    divisors, factor_retraction, is_trivial_extension, retraction_implies_trivial,
    ExtensionVerdict, ExtensionWitness,
};
pub use group::{FinAbGroup, GroupElement, DEFAULT_ENUMERATION_BOUND};
pub use subgroup::{Subgroup, SubgroupSpec, ENUMERATION_FALLBACK_ORDER};
pub use system::{solve_system, EqSystem, SolutionSet};
