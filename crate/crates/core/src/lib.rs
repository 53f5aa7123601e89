//! Conflict calculus for Friedkin-Johnsen opinion dynamics.
//!
//! The crate covers the equilibrium `z = (I + L)^{-1} s` and its tension
//! measures ([`opinion`]), exact single-link conflict deltas ([`delta`]),
//! spanning rooted forest interpretations of those deltas ([`forest`]),
//! spectral contraction bounds ([`spectral`]), link-prediction heuristics
//! ([`predictors`]), a budgeted convex conflict-minimization solver
//! ([`opt`]) and the conflict-awareness evaluation pipeline ([`harness`]).

pub mod bridge;
pub mod delta;
pub mod error;
pub mod forest;
pub mod graph;
pub mod harness;
pub mod opinion;
pub mod opt;
pub mod par;
pub mod plot;
pub mod predictors;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use graph::Graph;
pub use opinion::{ConflictReport, FjSystem, Opinions};
