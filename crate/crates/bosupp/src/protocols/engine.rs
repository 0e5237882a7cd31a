//! Joint Fock ⊗ ancilla density matrices and the heralding projection.

use crate::channels::{check_leakage, KrausChannel};
use crate::error::{Error, Result};
use crate::fock::apply::{conjugate_controlled, conjugate_full, conjugate_local};
use crate::fock::{CMatrix, CVector, CompositeSpace, State, C64, LEAKAGE_TOL};

/// Joint state whose leading factors come from the bosonic input (the Fock
/// mode and any passive systems) and whose trailing factors are ancillas.
#[derive(Clone, Debug)]
pub(crate) struct Joint {
    pub space: CompositeSpace,
    pub rho: CMatrix,
    /// Number of leading factors kept by [`Joint::herald`].
    pub kept: usize,
    pub leakage: f64,
}

impl Joint {
    /// `ρ ⊗ σ` with `σ` a density matrix over the listed ancilla dimensions.
    pub fn new(input: &State, ancilla_dims: &[usize], ancilla: &CMatrix) -> Result<Self> {
        let mut space = input.space().clone();
        for &d in ancilla_dims {
            space = space.with_ancilla(d)?;
        }
        let a: usize = ancilla_dims.iter().product();
        if ancilla.nrows() != a || ancilla.ncols() != a {
            return Err(Error::Dimension("ancilla state size".into()));
        }
        let kept = input.space().n_factors();
        Ok(Self {
            rho: input.matrix().kronecker(ancilla),
            space,
            kept,
            leakage: input.guard_leakage().unwrap_or(0.0),
        })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.space.factor_dims()
    }

    /// `Σ_n |n⟩⟨n| ⊗ u_n` acting on `target`, controlled by the Fock factor.
    pub fn controlled(&mut self, target: usize, blocks: &[CMatrix]) -> Result<()> {
        self.rho = conjugate_controlled(&self.rho, &self.dims(), 0, target, blocks)?;
        Ok(())
    }

    pub fn local(&mut self, factor: usize, u: &CMatrix) -> Result<()> {
        self.rho = conjugate_local(&self.rho, &self.dims(), factor, u)?;
        Ok(())
    }

    pub fn full(&mut self, u: &CMatrix) -> Result<()> {
        self.rho = conjugate_full(&self.rho, u)?;
        self.check_guard("joint unitary")
    }

    pub fn channel(&mut self, ch: &KrausChannel, factor: usize) -> Result<()> {
        let before = self.trace();
        self.rho = ch.apply_matrix(&self.rho, &self.dims(), factor)?;
        if factor == 0 && self.space.fock_space().is_some() {
            let st = State::from_matrix(self.space.clone(), self.rho.clone())?;
            let leak = check_leakage(before, &st, "noise channel")?;
            self.leakage = self.leakage.max(leak);
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    fn check_guard(&mut self, context: &str) -> Result<()> {
        let st = State::from_matrix(self.space.clone(), self.rho.clone())?;
        let leak = st.guard_leakage()?;
        let tol = LEAKAGE_TOL * st.weight().max(f64::MIN_POSITIVE);
        if leak > tol {
            return Err(Error::Leakage {
                leakage: leak,
                tolerance: tol,
                context: context.to_string(),
            });
        }
        self.leakage = self.leakage.max(leak);
        Ok(())
    }

    /// `Σ_v (I ⊗ ⟨v|) ρ (I ⊗ |v⟩)` over the ancilla kets `v`, which span the
    /// trailing factors jointly.
    pub fn herald(&self, kets: &[CVector]) -> Result<State> {
        let kept_space = self.space.select(&(0..self.kept).collect::<Vec<_>>())?;
        let lead = kept_space.dim();
        let a = self.space.dim() / lead;
        let mut out = CMatrix::zeros(lead, lead);
        for v in kets {
            if v.len() != a {
                return Err(Error::Dimension("herald ket size".into()));
            }
            let support: Vec<(usize, C64)> = v.iter().enumerate().filter(|(_, x)| x.norm() > 0.0).map(|(i, x)| (i, *x)).collect();
            for j in 0..lead {
                for i in 0..lead {
                    let mut acc = C64::new(0.0, 0.0);
                    for &(x, vx) in &support {
                        for &(y, vy) in &support {
                            acc += vx.conj() * self.rho[(i * a + x, j * a + y)] * vy;
                        }
                    }
                    out[(i, j)] += acc;
                }
            }
        }
        State::from_matrix(kept_space, out)
    }
}

/// Heralded (post-selected) protocol output.
#[derive(Clone, Debug)]
pub struct HeraldedResult {
    /// Accepted, unnormalized output; its trace is the success probability.
    pub unnormalized: State,
    pub p_succ: f64,
    pub normalized: State,
    /// Largest truncation leakage seen during the run.
    pub leakage: f64,
}

/// Success probabilities below this are treated as herald starvation.
pub const STARVATION_TOL: f64 = 1e-12;

impl HeraldedResult {
    pub fn new(unnormalized: State, leakage: f64) -> Result<Self> {
        let p = unnormalized.weight();
        if !(p >= STARVATION_TOL) {
            return Err(Error::Starvation(p));
        }
        let normalized = unnormalized.normalized()?;
        Ok(Self {
            p_succ: p,
            normalized,
            unnormalized,
            leakage,
        })
    }

    /// Fidelity of the normalized output with a pure reference.
    pub fn fidelity(&self, reference: &State) -> Result<f64> {
        crate::fock::fidelity(reference, &self.normalized)
    }
}

/// Basis ket `|i⟩` in dimension `d`.
pub(crate) fn basis(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = C64::new(1.0, 0.0);
    v
}

pub(crate) fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}
