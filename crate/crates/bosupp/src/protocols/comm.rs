//! Remote interferometer sharing a damped Bell pair between sender and
//! receiver.

use std::f64::consts::FRAC_PI_2;

use super::cf::rotation_blocks;
use super::engine::{basis, HeraldedResult, Joint};
use super::spec::X_AXIS;
use crate::channels::{qubit_damping, DampingKind, KrausChannel};
use crate::error::{Error, Result};
use crate::fock::{CMatrix, CVector, State, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommHerald {
    Accept00,
    Accept00And11,
}

/// `|Φ+⟩⟨Φ+|` with composite damping of strength `p` on both halves.
pub fn noisy_bell(p: f64) -> Result<CMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi = CVector::from_vec(vec![
        C64::new(s, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
    ]);
    let rho = State::pure(crate::fock::CompositeSpace::qudits(&[2, 2])?, &phi)?;
    let damp = qubit_damping(p, DampingKind::Composite)?;
    let rho = damp.apply_on_factor(&rho, 0)?;
    let rho = damp.apply_on_factor(&rho, 1)?;
    Ok(rho.matrix().clone())
}

pub(crate) fn comm_unnormalized(
    input: &State,
    cv: &KrausChannel,
    bell_p: f64,
    herald: CommHerald,
) -> Result<(State, f64)> {
    if !(0.0..=1.0).contains(&bell_p) {
        return Err(Error::Parameter(format!("Bell damping p={bell_p} outside [0,1]")));
    }
    let d = input
        .space()
        .fock_space()
        .ok_or_else(|| Error::Dimension("protocol input needs a Fock factor".into()))?
        .dim();
    let mut joint = Joint::new(input, &[2, 2], &noisy_bell(bell_p)?)?;
    let first = joint.kept;
    joint.controlled(first, &rotation_blocks(FRAC_PI_2, X_AXIS, d)?)?;
    joint.channel(cv, 0)?;
    joint.controlled(first + 1, &rotation_blocks(-FRAC_PI_2, X_AXIS, d)?)?;
    let kets = match herald {
        CommHerald::Accept00 => vec![basis(4, 0)],
        CommHerald::Accept00And11 => vec![basis(4, 0), basis(4, 3)],
    };
    Ok((joint.herald(&kets)?, joint.leakage))
}

/// Sender applies `e^{iπ/2 a†a σ_x}` to its half of the Bell pair, the mode
/// crosses `cv`, and the receiver applies `e^{−iπ/2 a†a σ_x}` to the other
/// half before both halves are measured.
pub fn comm_protocol(
    input: &State,
    cv: &KrausChannel,
    bell_p: f64,
    herald: CommHerald,
) -> Result<HeraldedResult> {
    let (out, leak) = comm_unnormalized(input, cv, bell_p, herald)?;
    HeraldedResult::new(out, leak)
}
