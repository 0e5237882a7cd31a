//! Kraus channels: bosonic loss, amplification and their thermal and
//! displacement-noise compositions, plus qubit and qutrit damping.

mod cv;
mod dv;
mod spec;

pub use cv::{amp_channel, cv_channel, gdn_channel, loss_channel, thermal_channel, CvNoiseParams};
pub use dv::{depolarizing, qubit_damping, qutrit_damping, DampingKind, DvKind, DvNoiseParams, QutritKind};
pub use spec::{CvNoise, DvNoise};

use crate::error::{Error, Result};
use crate::fock::apply::{sandwich_add, FactorOp};
use crate::fock::{CMatrix, CompositeSpace, FockSpace, Operator, State, C64, LEAKAGE_TOL};

/// One elementary jump recorded in a Kraus label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Jump {
    /// `l` photons lost.
    Loss(usize),
    /// `k` photons gained.
    Gain(usize),
    /// Index of a finite-dimensional Kraus operator.
    Dv(usize),
}

/// Jumps of a (possibly composed) Kraus operator, in application order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KrausLabel(pub Vec<Jump>);

impl KrausLabel {
    pub fn single(j: Jump) -> Self {
        Self(vec![j])
    }

    /// Photons lost minus photons gained.
    pub fn net_loss(&self) -> isize {
        self.0
            .iter()
            .map(|j| match *j {
                Jump::Loss(l) => l as isize,
                Jump::Gain(k) => -(k as isize),
                Jump::Dv(_) => 0,
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausOp {
    pub label: KrausLabel,
    pub op: FactorOp,
}

/// Ordered list of labeled Kraus operators acting on one tensor factor.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    target: CompositeSpace,
    ops: Vec<KrausOp>,
    deficit: f64,
    /// Component channels, in application order, when built by
    /// [`compose`]; applying them in sequence equals applying `ops`.
    stages: Vec<KrausChannel>,
}

impl KrausChannel {
    /// Builds a channel on a single-factor space, recording the
    /// completeness deficit (on the guarded levels for a Fock target).
    pub fn new(target: CompositeSpace, ops: Vec<KrausOp>) -> Result<Self> {
        if target.n_factors() != 1 {
            return Err(Error::Dimension("Kraus channels act on a single factor".into()));
        }
        let d = target.dim();
        if ops.is_empty() || ops.iter().any(|k| k.op.dim() != d) {
            return Err(Error::Dimension(format!("Kraus operators must be {d}x{d}")));
        }
        let mut seen = std::collections::HashSet::new();
        if !ops.iter().all(|k| seen.insert(k.label.clone())) {
            return Err(Error::Parameter("duplicate Kraus labels".into()));
        }
        let deficit = completeness_deficit(&target, &ops);
        Ok(Self {
            target,
            ops,
            deficit,
            stages: Vec::new(),
        })
    }

    pub fn identity(target: CompositeSpace) -> Result<Self> {
        let d = target.dim();
        Self::new(
            target,
            vec![KrausOp {
                label: KrausLabel(Vec::new()),
                op: FactorOp::from_matrix(CMatrix::identity(d, d)),
            }],
        )
    }

    pub fn target(&self) -> &CompositeSpace {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    pub fn kraus(&self) -> &[KrausOp] {
        &self.ops
    }

    /// `‖I − ΣK†K‖` (max entry) on the guarded subspace.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    /// Single Kraus operator equal to the identity.
    pub fn is_identity(&self) -> bool {
        if self.ops.len() != 1 {
            return false;
        }
        let m = self.ops[0].op.to_matrix();
        let d = m.nrows();
        crate::fock::max_abs(&(m - CMatrix::identity(d, d))) == 0.0
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Dense Kraus operators.
    pub fn operators(&self) -> Vec<Operator> {
        self.ops
            .iter()
            .map(|k| Operator::new(self.target.clone(), k.op.to_matrix()).expect("sized at construction"))
            .collect()
    }

    /// `Σ K ρ K†` on the flat joint matrix `rho` whose factor dimensions are
    /// `dims`, acting on `factor`.
    pub fn apply_matrix(&self, rho: &CMatrix, dims: &[usize], factor: usize) -> Result<CMatrix> {
        if !self.stages.is_empty() {
            let mut cur = rho.clone();
            for s in &self.stages {
                cur = s.apply_matrix(&cur, dims, factor)?;
            }
            return Ok(cur);
        }
        let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
        for k in &self.ops {
            sandwich_add(rho, dims, factor, &k.op, &mut out)?;
        }
        Ok(out)
    }

    pub fn apply(&self, state: &State) -> Result<State> {
        self.apply_on_factor(state, 0)
    }

    /// Lifts the channel with identities on the other factors. For a Fock
    /// target the lost trace and the output guard-band weight are checked
    /// against the leakage tolerance.
    pub fn apply_on_factor(&self, state: &State, factor: usize) -> Result<State> {
        let dims = state.space().factor_dims();
        let fock_target = self.target.fock_space().is_some();
        if fock_target && (factor != 0 || state.space().fock_space() != self.target.fock_space()) {
            return Err(Error::Dimension("Fock channel must act on the matching Fock factor".into()));
        }
        if !fock_target && state.space().fock_space().is_some() && factor == 0 {
            return Err(Error::Dimension("finite channel applied to the Fock factor".into()));
        }
        let out = self.apply_matrix(state.matrix(), &dims, factor)?;
        let out = State::from_matrix(state.space().clone(), out)?;
        if fock_target {
            check_leakage(state.weight(), &out, "channel application")?;
        }
        Ok(out)
    }
}

/// Errors when a Fock-space state lost more than the tolerance of its
/// trace or holds more than the tolerance in the guard band.
pub(crate) fn check_leakage(weight_in: f64, out: &State, context: &str) -> Result<f64> {
    let lost = (weight_in - out.weight()).max(0.0);
    let leak = lost + out.guard_leakage()?;
    let tol = LEAKAGE_TOL * weight_in.max(f64::MIN_POSITIVE);
    if leak > tol {
        return Err(Error::Leakage {
            leakage: leak,
            tolerance: tol,
            context: context.to_string(),
        });
    }
    Ok(leak)
}

fn completeness_deficit(target: &CompositeSpace, ops: &[KrausOp]) -> f64 {
    let d = target.dim();
    let g = match target.fock_space() {
        Some(f) => f.guarded_max() + 1,
        None => d,
    };
    let all_mono = ops.iter().all(|k| matches!(k.op, FactorOp::Monomial(_)));
    if all_mono {
        // ΣK†K is diagonal when every operator shifts by a fixed offset.
        let mut diag = vec![0.0; d];
        for k in ops {
            if let FactorOp::Monomial(m) = &k.op {
                for (n, w) in m.weights.iter().enumerate() {
                    let t = n as isize + m.offset;
                    if t >= 0 && (t as usize) < d {
                        diag[n] += w.norm_sqr();
                    }
                }
            }
        }
        return diag[..g].iter().fold(0.0, |acc, v| acc.max((1.0 - v).abs()));
    }
    let mut sum = CMatrix::zeros(d, d);
    for k in ops {
        let m = k.op.to_matrix();
        sum += m.adjoint() * m;
    }
    let mut worst: f64 = 0.0;
    for i in 0..g {
        for j in 0..g {
            let t = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((t - sum[(i, j)]).norm());
        }
    }
    worst
}

/// Channel `c2 ∘ c1` (apply `c1` first). The Kraus list is the product set
/// with concatenated labels; deficits add.
pub fn compose(c2: &KrausChannel, c1: &KrausChannel) -> Result<KrausChannel> {
    if c1.target != c2.target {
        return Err(Error::Dimension("composing channels on different spaces".into()));
    }
    let mut ops = Vec::with_capacity(c1.ops.len() * c2.ops.len());
    for k1 in &c1.ops {
        for k2 in &c2.ops {
            let mut label = k1.label.0.clone();
            label.extend_from_slice(&k2.label.0);
            ops.push(KrausOp {
                label: KrausLabel(label),
                op: k2.op.compose(&k1.op),
            });
        }
    }
    let mut stages = Vec::new();
    for c in [c1, c2] {
        if c.stages.is_empty() {
            stages.push(c.clone());
        } else {
            stages.extend(c.stages.iter().cloned());
        }
    }
    Ok(KrausChannel {
        target: c1.target.clone(),
        ops,
        deficit: c1.deficit + c2.deficit,
        stages,
    })
}

pub(crate) fn fock_target(space: FockSpace) -> CompositeSpace {
    CompositeSpace::fock(space)
}

#[cfg(test)]
mod tests;
