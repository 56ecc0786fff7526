//! Mermin measurement scenarios.

mod mermin;
mod twomeas;

pub use mermin::{
    build_nonlocal_scenario, build_nonlocal_scenario_system, build_nonlocal_scenario_with_controls,
    control_count, validate_scenario, MerminScenario, PhaseEquation, ValidationReport,
};
pub use twomeas::{
    canonical_representative, count_effective_pairs, family_solutions, newcond, newcond_check,
    pair_count_series, scan_newcond, viable_families, FamilyKind, NewCondReport, PairCount,
    TwoMeasScenario, VariationFamily, VariationPolicy, PAIR_CSV_HEADER,
};
