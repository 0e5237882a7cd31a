//! Single-qutrit ancilla variant.

use super::engine::{basis, projector, HeraldedResult, Joint};
use crate::channels::{qutrit_damping, KrausChannel, QutritKind};
use crate::error::{Error, Result};
use crate::fock::{CMatrix, State, C64};

/// Per-level qutrit block `u_n` of the joint unitary.
pub fn qutrit_block(n: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ph = if n % 2 == 0 { 1.0 } else { -1.0 };
    let z = 0.0;
    let r = |x: f64| C64::new(x, 0.0);
    CMatrix::from_row_slice(
        3,
        3,
        &[
            r(s),
            r(s),
            r(z),
            r(z),
            r(z),
            r(ph),
            r(ph * s),
            r(-ph * s),
            r(z),
        ],
    )
}

pub(crate) fn qutrit_unnormalized(
    input: &State,
    cv: &KrausChannel,
    dv: &KrausChannel,
    level: usize,
) -> Result<(State, f64)> {
    if level > 2 {
        return Err(Error::Parameter(format!("qutrit herald level {level}")));
    }
    if dv.dim() != 3 {
        return Err(Error::Dimension(format!("qutrit noise acts on dimension {}", dv.dim())));
    }
    let d = input
        .space()
        .fock_space()
        .ok_or_else(|| Error::Dimension("protocol input needs a Fock factor".into()))?
        .dim();
    let blocks: Vec<CMatrix> = (0..d).map(qutrit_block).collect();
    let inverse: Vec<CMatrix> = blocks.iter().map(|b| b.adjoint()).collect();
    let mut joint = Joint::new(input, &[3], &projector(&basis(3, 0)))?;
    let a = joint.kept;
    joint.controlled(a, &blocks)?;
    joint.channel(cv, 0)?;
    if !dv.is_identity() {
        joint.channel(dv, a)?;
    }
    joint.controlled(a, &inverse)?;
    Ok((joint.herald(&[basis(3, level)])?, joint.leakage))
}

/// Qutrit ancilla in `|0⟩`, joint unitary, CV noise on the mode and
/// composite qutrit damping `p` on the ancilla, inverse unitary, projection
/// onto `|level⟩`.
pub fn qutrit_protocol(input: &State, cv: &KrausChannel, p: f64, level: usize) -> Result<HeraldedResult> {
    let dv = qutrit_damping(p, QutritKind::Composite)?;
    let (out, leak) = qutrit_unnormalized(input, cv, &dv, level)?;
    HeraldedResult::new(out, leak)
}
