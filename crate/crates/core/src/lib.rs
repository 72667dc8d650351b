//! Dimensional analysis meets active subspaces.
//!
//! Exact Buckingham Pi decompositions ([`pigroups`]) show that a physical
//! law `q = f(q_1, ..., q_m)` is a ridge function of `x = log q` whose
//! matrix `A = [w | W]` spans the dimensional-analysis subspace ([`ridge`]).
//! The active subspace estimated from gradient outer products
//! ([`activesubspace`]) must therefore lie inside `span(A)`; [`subspace`]
//! measures that inclusion, and [`pipeflow`] supplies the classical rough
//! pipe as a test bed.
//!
//! Out of scope: sufficient dimension reduction estimators for noisy
//! regression data.

pub mod activesubspace;
pub mod cli;
pub mod dimensions;
pub mod eigen;
pub mod error;
pub mod exact;
pub mod io;
pub mod linalg;
pub mod model;
pub mod pigroups;
pub mod pipeflow;
pub mod quadrature;
pub mod ridge;
pub mod subspace;

pub use error::{Error, Result};
