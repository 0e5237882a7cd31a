//! Closed-form success probabilities and fidelities, the second-order
//! expansion of the heralded state, and Haar moments for a logical qubit.

mod fidelity;
pub mod haar;
mod perturbative;
mod psucc;

pub use fidelity::{
    avg_fidelity_suppressed, avg_fidelity_unsuppressed, suppressed_residual_bound,
    teleportation_fidelity, teleportation_state_fidelity, unsuppressed_residual_bound,
    PERTURBATIVE_ETA_MAX,
};

/// Agreement required between exact closed forms and simulation.
pub const CLOSED_FORM_TOL: f64 = 1e-10;
pub use haar::{bloch_average, haar_moment_trace};
pub use perturbative::{
    fidelity_linear_coefficients, formal_filtered, perturbative_state, PerturbativeExpansion,
};
pub use psucc::{
    comm_psucc_closed, delta_p, legendre, number_power_trace, psucc_asymptotic, psucc_closed,
    psucc_single, single_ancilla_ratio, CommPsucc, DeltaP,
};

#[cfg(test)]
mod tests;
