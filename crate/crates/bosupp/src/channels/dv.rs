use super::{compose, Jump, KrausChannel, KrausLabel, KrausOp};
use crate::error::{Error, Result};
use crate::fock::apply::FactorOp;
use crate::fock::{CMatrix, CompositeSpace, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DampingKind {
    Amplitude,
    Phase,
    /// Phase damping after amplitude damping of the same strength.
    Composite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QutritKind {
    /// `|2⟩ → |1⟩ → |0⟩` decay.
    CascadedAd,
    /// Dephasing of the middle level.
    MidPd,
    /// `MidPd ∘ CascadedAd`.
    Composite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DvKind {
    Damping(DampingKind),
    Depolarizing,
}

/// Qubit ancilla noise; `p` is the depolarizing rate for
/// [`DvKind::Depolarizing`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DvNoiseParams {
    pub p: f64,
    pub kind: DvKind,
}

impl DvNoiseParams {
    pub fn new(p: f64, kind: DvKind) -> Result<Self> {
        check_p(p)?;
        Ok(Self { p, kind })
    }

    pub fn channel(&self) -> Result<KrausChannel> {
        match self.kind {
            DvKind::Damping(k) => qubit_damping(self.p, k),
            DvKind::Depolarizing => depolarizing(self.p),
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::NonFinite("damping strength".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("damping strength {p} outside [0,1]")));
    }
    Ok(())
}

fn dense(d: usize, entries: &[(usize, usize, f64)]) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for &(r, c, v) in entries {
        m[(r, c)] = C64::new(v, 0.0);
    }
    m
}

fn channel(d: usize, mats: Vec<CMatrix>) -> Result<KrausChannel> {
    let target = CompositeSpace::qudits(&[d])?;
    let ops = mats
        .into_iter()
        .enumerate()
        .map(|(j, m)| KrausOp {
            label: KrausLabel::single(Jump::Dv(j)),
            op: FactorOp::Dense(m),
        })
        .collect();
    KrausChannel::new(target, ops)
}

pub fn qubit_damping(p: f64, kind: DampingKind) -> Result<KrausChannel> {
    check_p(p)?;
    let s = (1.0 - p).sqrt();
    let k0 = dense(2, &[(0, 0, 1.0), (1, 1, s)]);
    match kind {
        DampingKind::Amplitude => channel(2, vec![k0, dense(2, &[(0, 1, p.sqrt())])]),
        DampingKind::Phase => channel(2, vec![k0, dense(2, &[(1, 1, p.sqrt())])]),
        DampingKind::Composite => compose(
            &qubit_damping(p, DampingKind::Phase)?,
            &qubit_damping(p, DampingKind::Amplitude)?,
        ),
    }
}

pub fn qutrit_damping(p: f64, kind: QutritKind) -> Result<KrausChannel> {
    check_p(p)?;
    let s = (1.0 - p).sqrt();
    let r = p.sqrt();
    match kind {
        QutritKind::CascadedAd => channel(
            3,
            vec![
                dense(3, &[(0, 0, 1.0), (1, 1, s), (2, 2, s)]),
                dense(3, &[(1, 2, r)]),
                dense(3, &[(0, 1, r)]),
            ],
        ),
        QutritKind::MidPd => channel(
            3,
            vec![dense(3, &[(0, 0, 1.0), (1, 1, s), (2, 2, 1.0)]), dense(3, &[(1, 1, r)])],
        ),
        QutritKind::Composite => compose(
            &qutrit_damping(p, QutritKind::MidPd)?,
            &qutrit_damping(p, QutritKind::CascadedAd)?,
        ),
    }
}

/// `(1−η′)ρ + (η′/3) Σ σ_j ρ σ_j`.
pub fn depolarizing(eta: f64) -> Result<KrausChannel> {
    check_p(eta)?;
    let a = (1.0 - eta).sqrt();
    let b = (eta / 3.0).sqrt();
    let i = C64::new(0.0, 1.0);
    let mut y = CMatrix::zeros(2, 2);
    y[(0, 1)] = -i * b;
    y[(1, 0)] = i * b;
    channel(
        2,
        vec![
            dense(2, &[(0, 0, a), (1, 1, a)]),
            dense(2, &[(0, 1, b), (1, 0, b)]),
            y,
            dense(2, &[(0, 0, b), (1, 1, -b)]),
        ],
    )
}
