//! Potential-function profiles of small graphs, the extremal degree
//! sequences built from them, σ-stability classification, exhaustive
//! potentially-H-graphic oracles, and an executable version of the
//! iterative lay-off algorithm that drives the stability proofs.
//!
//! Module map:
//! - [`sequence`]: degree sequences, graphicality, lay-off, ℓ¹ distance.
//! - [`graphs`]: small graphs, generator expressions, `α`, `∇_i`, `D^(t)(H)`.
//! - [`potential`]: `σ̃`, `i*`, Type 1/2, `π̃_i(H,n)`, `P(H,n)`, `ρ(H,n)`.
//! - [`stability`]: the σ-stability and weak σ-stability classifiers.
//! - [`oracle`]: realizations, exact potentially-H-graphic decisions, `σ(H,n)`.
//! - [`probe`]: the iterative algorithm with a full trace.

pub mod error;
pub mod graphs;
pub mod oracle;
pub mod potential;
pub mod probe;
pub mod sequence;
pub mod stability;

pub use error::{Error, Result};
pub use graphs::{GraphExpr, SmallGraph};
pub use sequence::{l1_distance, DegreeSequence};
