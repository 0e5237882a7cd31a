//! Truncated Fock-space simulator for hybrid CV-DV noise suppression.
//!
//! A bosonic mode carrying an encoded qubit is coupled to one or more
//! discrete-variable ancillas through conditional rotations, sent through a
//! noisy channel, disentangled, and heralded. The crate provides the Fock
//! linear algebra, the bosonic codes, Kraus channel factories, full joint
//! simulations of the protocols, and the closed-form success probabilities
//! and fidelities they are checked against.

pub mod analytics;
pub mod channels;
pub mod codes;
pub mod descriptor;
pub mod error;
pub mod fock;
pub mod protocols;
pub mod selftest;

pub use error::{Error, Result};
pub use fock::{CMatrix, CVector, CompositeSpace, FockSpace, Operator, State, C64};

/// Crate version, recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
