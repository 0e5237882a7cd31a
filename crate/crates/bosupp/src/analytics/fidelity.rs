//! Second-order Haar-averaged fidelities and the noisy-resource
//! teleportation benchmark.

use crate::codes::MomentSet;
use crate::error::{Error, Result};

/// Suppressed average fidelity under thermal noise `(η, n̄)`, accurate to
/// `O(η²)`. Pure loss is `n̄ = 0`.
pub fn avg_fidelity_suppressed(m: &MomentSet, eta: f64, nbar: f64) -> f64 {
    let s = nbar * nbar + nbar;
    let bracket = nbar * nbar + 3.0 * (nbar + 0.5).powi(2) * m.n2 + (nbar * nbar - nbar - 0.5) * m.n_mean
        - (1.0 / 6.0 + 4.0 / 3.0 * s) * m.g_n
        - (1.0 / 3.0 + 2.0 / 3.0 * s) * m.g_a2;
    1.0 - eta * eta * bracket
}

/// Unsuppressed average fidelity under thermal noise, accurate to `O(η)`.
pub fn avg_fidelity_unsuppressed(m: &MomentSet, eta: f64, nbar: f64) -> f64 {
    let bracket = nbar + (1.0 + 2.0 * nbar) * m.n_mean
        - 2.0 * nbar / 3.0 * (m.cad_ca + m.abs_a_sq)
        - 2.0 * (1.0 + nbar) / 3.0 * (m.ca_cad + m.abs_a_sq);
    1.0 - eta * bracket
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("damping p={p} outside [0,1]")));
    }
    Ok(())
}

/// Teleportation fidelity over a damped Bell pair for an input with
/// populations `ρ00`, `1−ρ00`.
pub fn teleportation_state_fidelity(p: f64, rho00: f64) -> Result<f64> {
    check_p(p)?;
    Ok(1.0 - p + p * p - 2.0 * p * p * rho00 * (1.0 - rho00))
}

/// Haar average of [`teleportation_state_fidelity`]: `1 − p + 2p²/3`.
pub fn teleportation_fidelity(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(1.0 - p + 2.0 * p * p / 3.0)
}

/// Largest loss rate at which the second-order fidelities are compared
/// against simulation.
pub const PERTURBATIVE_ETA_MAX: f64 = 0.1;

/// Allowed gap between simulation and [`avg_fidelity_suppressed`]. The
/// dropped terms are third order in `η` and weighted by the third photon-number
/// moment, so the bound is `(1+2n̄)² η³ (1 + ⟨n³⟩)`. Over the bundled codes
/// (GKP included) the observed gap stays below half of it for `η ≤ 0.1`.
pub fn suppressed_residual_bound(m: &MomentSet, eta: f64, nbar: f64) -> f64 {
    (1.0 + 2.0 * nbar).powi(2) * eta.powi(3) * (1.0 + m.n3) + 1e-12
}

/// Allowed gap between simulation and [`avg_fidelity_unsuppressed`],
/// `(1+2n̄)² η² (1 + ⟨n²⟩)`.
pub fn unsuppressed_residual_bound(m: &MomentSet, eta: f64, nbar: f64) -> f64 {
    (1.0 + 2.0 * nbar).powi(2) * eta * eta * (1.0 + m.n2) + 1e-12
}
