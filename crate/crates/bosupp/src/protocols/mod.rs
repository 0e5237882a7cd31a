//! Suppression interferometers simulated in the joint mode ⊗ ancilla space.

mod bypass;
mod cf;
mod comm;
mod engine;
mod logical;
mod pipeline;
mod pqp;
mod qutrit;
mod spec;
mod teleport;

pub use bypass::bypass_model;
pub use cf::{
    conditional_rotation, filter_weight, flipped_ground, parity_shortcut, passes_filter,
    protect_hybrid, rotation_blocks, suppress_analytic, suppress_analytic_thetas, suppress_cf,
};
pub use comm::{comm_protocol, noisy_bell, CommHerald};
pub use engine::{HeraldedResult, STARVATION_TOL};
pub use logical::{LogicalProcess, AVERAGE_TOL};
pub use pipeline::Protocol;
pub use pqp::{
    conditional_displacement, optimize_pqp, pqp_condrot, pqp_mean_fidelity, pqp_unitary, PqpLayer,
    PqpOptimum, PqpParams, BETA_MAX, RESTARTS,
};
pub use qutrit::{qutrit_block, qutrit_protocol};
pub use teleport::{teleport, teleport_fidelity};
pub use spec::{
    default_thetas, AncillaInit, FirstGate, GateNoise, Herald, ProtocolSpec, Variant, X_AXIS,
};

#[cfg(test)]
mod tests;
