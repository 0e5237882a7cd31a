use super::linalg::eigh;
use super::operator::{max_abs, Operator};
use super::space::{strides, CompositeSpace};
use super::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// Density operator together with its trace. Unnormalized (heralded)
/// branches keep their weight, which equals the branch probability.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    op: Operator,
    weight: f64,
}

impl State {
    /// Wraps a Hermitian operator. Positivity is not checked here; use
    /// [`State::check_psd`] where it matters, it costs a diagonalization.
    pub fn from_operator(op: Operator) -> Result<Self> {
        let tr = op.trace();
        let weight = tr.re;
        let scale = weight.abs().max(max_abs(op.matrix()));
        if tr.im.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidState(format!(
                "trace has imaginary part {:.3e}",
                tr.im
            )));
        }
        if weight < -1e-14 {
            return Err(Error::InvalidState(format!("negative trace {weight:.3e}")));
        }
        let herm = max_abs(&(op.matrix() - op.matrix().adjoint()));
        if herm > 1e-12 * scale {
            return Err(Error::InvalidState(format!(
                "not Hermitian: deviation {herm:.3e}"
            )));
        }
        Ok(Self {
            op,
            weight: weight.max(0.0),
        })
    }

    pub fn from_matrix(space: impl Into<CompositeSpace>, m: CMatrix) -> Result<Self> {
        Self::from_operator(Operator::new(space, m)?)
    }

    /// `|ψ⟩⟨ψ|` with weight `‖ψ‖²`.
    pub fn pure(space: impl Into<CompositeSpace>, ket: &CVector) -> Result<Self> {
        let space = space.into();
        if ket.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "ket length {} vs space dimension {}",
                ket.len(),
                space.dim()
            )));
        }
        let m = ket * ket.adjoint();
        Self::from_operator(Operator::new(space, m)?)
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn space(&self) -> &CompositeSpace {
        self.op.space()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn normalized(&self) -> Result<Self> {
        if self.weight <= f64::MIN_POSITIVE {
            return Err(Error::InvalidState("cannot normalize a zero state".into()));
        }
        Ok(Self {
            op: self.op.scale(C64::new(1.0 / self.weight, 0.0)),
            weight: 1.0,
        })
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Parameter(format!("state scale {s}")));
        }
        Ok(Self {
            op: self.op.scale(C64::new(s, 0.0)),
            weight: self.weight * s,
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = eigh(self.matrix());
        vals.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Errors when the smallest eigenvalue is below `-1e-10 * weight`.
    pub fn check_psd(&self) -> Result<()> {
        let m = self.min_eigenvalue();
        if m < -1e-10 * self.weight.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {m:.3e} (weight {:.3e})",
                self.weight
            )));
        }
        Ok(())
    }

    /// `tr(ρ O)`.
    pub fn expect(&self, o: &Operator) -> Result<C64> {
        if o.space() != self.space() {
            return Err(Error::Dimension("observable on a different space".into()));
        }
        Ok(trace_product(self.matrix(), o.matrix()))
    }

    /// Trace norm distance `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        let diff = self.op.sub(&other.op)?;
        let (vals, _) = eigh(diff.matrix());
        Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
    }

    /// Population of each Fock level, summed over all other factors.
    pub fn fock_populations(&self) -> Result<Vec<f64>> {
        let fock = self
            .space()
            .fock_space()
            .ok_or_else(|| Error::Dimension("state has no Fock factor".into()))?;
        let dims = self.space().factor_dims();
        let inner = strides(&dims)[0];
        let m = self.matrix();
        let mut pops = vec![0.0; fock.dim()];
        for (n, p) in pops.iter_mut().enumerate() {
            for a in 0..inner {
                let i = n * inner + a;
                *p += m[(i, i)].re;
            }
        }
        Ok(pops)
    }

    /// Weight carried by Fock levels above the guarded subspace.
    pub fn guard_leakage(&self) -> Result<f64> {
        let fock = self
            .space()
            .fock_space()
            .ok_or_else(|| Error::Dimension("state has no Fock factor".into()))?;
        let pops = self.fock_populations()?;
        Ok(pops[fock.guarded_max() + 1..]
            .iter()
            .map(|p| p.max(0.0))
            .sum())
    }
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}
