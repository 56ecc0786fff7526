//! Dense state-vector engine for `D`-level systems.

mod laws;
mod measure;
mod state;

pub use laws::{
    is_z_phase, permute_systems, verify_laws, FrobeniusStructure, LawReport, ObservablePair,
    StructureLaws,
};
pub use measure::{
    complementarity_report, mermin_outcome_distribution, mermin_outcome_distribution_bounded,
    mermin_outcome_distribution_simplified, ComplementarityReport, Distribution,
};
pub use state::{
    antipode, ghz_state, ghz_state_bounded, omega, phased_x_basis, x_basis, z_phase_gate,
    z_phase_gate_radians, LinOperator, StateVector, DEFAULT_AMPLITUDE_BOUND,
};
