//! Generalized Mermin non-locality toolkit.
//!
//! * [`abgroup`]: finite abelian groups and the algebraic extension decision.
//! * [`phase`]: qudit Z-phases as exact rational turns.
//! * [`qudit`]: dense state-vector engine and algebraic law checks.
//! * [`scenario`]: Mermin scenarios, the two-measurement effectiveness
//!   condition, and effective-pair counting.
//! * [`lhv`]: local hidden variable refutation and construction.
//! * [`frel`]: the finite-sets-and-relations model.
//! * [`qss`]: the HBB CQ (N,N) secret sharing simulator.
//! * [`cli`]: the `mermin` command-line front end.

pub mod abgroup;
pub mod cli;
pub mod error;
pub mod frel;
pub mod lhv;
pub mod phase;
pub mod qss;
pub mod qudit;
pub mod scenario;

pub use error::{Error, Result};

/// Tolerance used for every floating-point comparison unless overridden.
pub const DEFAULT_TOL: f64 = 1e-9;
