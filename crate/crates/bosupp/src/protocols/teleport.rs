//! Qubit teleportation over the damped Bell pair, the DV benchmark for the
//! communication protocol.

use super::comm::noisy_bell;
use crate::error::Result;
use crate::fock::{CMatrix, CVector, C64};

fn paulis() -> [CMatrix; 4] {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

/// Output of teleporting `c0|0⟩ + c1|1⟩` with a Bell measurement on the input
/// and the first resource qubit, and the Pauli correction on the second.
/// Outcome `σ_k` is the Bell state `(σ_k ⊗ I)|Φ+⟩`, corrected by `σ_k`.
pub fn teleport(p: f64, c0: C64, c1: C64) -> Result<CMatrix> {
    let bell = noisy_bell(p)?;
    let psi = CVector::from_vec(vec![c0, c1]);
    let joint = (&psi * psi.adjoint()).kronecker(&bell);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi = CVector::from_vec(vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)]);
    let id = CMatrix::identity(2, 2);
    let mut out = CMatrix::zeros(2, 2);
    for s in paulis() {
        let b = s.kronecker(&id) * &phi;
        // ⟨b| on the first two qubits
        let bra = b.adjoint().kronecker(&id);
        let branch = &bra * &joint * bra.adjoint();
        out += &s * branch * s.adjoint();
    }
    Ok(out)
}

/// `⟨ψ|out|ψ⟩` for [`teleport`].
pub fn teleport_fidelity(p: f64, c0: C64, c1: C64) -> Result<f64> {
    let out = teleport(p, c0, c1)?;
    let psi = CVector::from_vec(vec![c0, c1]);
    Ok((psi.adjoint() * out * psi)[(0, 0)].re)
}
