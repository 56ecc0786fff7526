//! Local hidden variable models as mixtures of deterministic local
//! assignments: refutation and explicit construction.

mod check;
mod model;
mod table;

pub use check::{lhv_exists, parity_system, Certificate, Existence, LhvMode, LhvVerdict};
pub use model::{
    build_trivial_lhv, identity_solution, trivial_model, GroupScenario, LhvModel, LocalAssignment,
};
pub use table::{
    parity_table, quantum_table, quantum_table_bounded, Contexts, PossibilisticTable, TableRow,
};

/// Default cap on search nodes and enumerated models.
pub const DEFAULT_SEARCH_BOUND: u64 = 10_000_000;
