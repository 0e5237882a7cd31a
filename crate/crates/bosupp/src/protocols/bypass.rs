//! Gate-count cost model of the two-ancilla bypass scheme: eight noisy
//! conditional gates around a transit in which only the ancillas are
//! exposed, to DV damping.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use super::cf::rotation_blocks;
use super::engine::{basis, projector, HeraldedResult, Joint};
use super::spec::{GateNoise, X_AXIS};
use crate::channels::{loss_channel, qubit_damping, DampingKind, KrausChannel};
use crate::error::{Error, Result};
use crate::fock::{CMatrix, State};

pub(crate) fn bypass_unnormalized(
    input: &State,
    dv: &KrausChannel,
    gate_noise: Option<GateNoise>,
) -> Result<(State, f64)> {
    if dv.dim() != 2 {
        return Err(Error::Dimension(format!("ancilla noise acts on dimension {}", dv.dim())));
    }
    let fock = input
        .space()
        .fock_space()
        .ok_or_else(|| Error::Dimension("protocol input needs a Fock factor".into()))?;
    let d = fock.dim();
    let noise = match gate_noise {
        Some(g) => Some((loss_channel(g.loss, fock)?, qubit_damping(g.damping, DampingKind::Composite)?)),
        None => None,
    };
    let ground = projector(&basis(2, 0));
    let mut joint = Joint::new(input, &[2, 2], &ground.kronecker(&ground))?;
    let a = joint.kept;
    let gates: [(usize, f64); 2] = [(a, FRAC_PI_2), (a + 1, FRAC_PI_4)];
    let fwd: Vec<Vec<CMatrix>> = gates
        .iter()
        .map(|&(_, t)| rotation_blocks(t, X_AXIS, d))
        .collect::<Result<_>>()?;
    let inv: Vec<Vec<CMatrix>> = gates
        .iter()
        .map(|&(_, t)| rotation_blocks(-t, X_AXIS, d))
        .collect::<Result<_>>()?;
    let gate = |joint: &mut Joint, which: usize, blocks: &[CMatrix]| -> Result<()> {
        let target = gates[which].0;
        joint.controlled(target, blocks)?;
        if let Some((loss, damp)) = &noise {
            joint.channel(loss, 0)?;
            joint.channel(damp, target)?;
        }
        Ok(())
    };
    for which in [0, 1, 0, 1] {
        gate(&mut joint, which, &fwd[which])?;
    }
    if !dv.is_identity() {
        joint.channel(dv, a)?;
        joint.channel(dv, a + 1)?;
    }
    for which in [1, 0, 1, 0] {
        gate(&mut joint, which, &inv[which])?;
    }
    let herald = basis(4, 0);
    Ok((joint.herald(&[herald])?, joint.leakage))
}

/// Heralded output of the bypass cost model; see the module docs.
pub fn bypass_model(input: &State, dv: &KrausChannel, gate_noise: Option<GateNoise>) -> Result<HeraldedResult> {
    let (out, leak) = bypass_unnormalized(input, dv, gate_noise)?;
    HeraldedResult::new(out, leak)
}
