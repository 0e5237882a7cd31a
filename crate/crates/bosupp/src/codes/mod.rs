//! Bosonic qubit codes: cat, binomial, finite-energy GKP and squeezed cat
//! codewords, plus the derived codespace identity, moments and parity data.

mod construct;
mod properties;

pub use construct::{binomial_code, cat_code, gkp_code, squeezed_cat, CodeSpec};
pub use properties::{
    codespace_identity, haar_coefficients, haar_sample, logical_state, moments, parity_class,
    MomentSet, ParityClass, ParityKind,
};

use crate::error::{Error, Result};
use crate::fock::{CVector, FockSpace, C64};

/// Maximum codeword weight tolerated above the guarded subspace.
pub const CODEWORD_LEAKAGE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum CodeParams {
    Cat { n: usize, alpha: f64 },
    SqueezedCat { n: usize, alpha: f64, db: f64 },
    Binomial { n: usize, kappa: usize },
    Gkp { delta: f64 },
    Custom,
}

/// Two orthonormal logical codewords in a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct BosonicCode {
    name: String,
    space: FockSpace,
    zero: CVector,
    one: CVector,
    params: CodeParams,
}

impl BosonicCode {
    /// Validates norms, orthogonality and guard-band leakage.
    pub fn new(
        name: impl Into<String>,
        space: FockSpace,
        zero: CVector,
        one: CVector,
        params: CodeParams,
    ) -> Result<Self> {
        let name = name.into();
        for (label, v) in [("|0_L⟩", &zero), ("|1_L⟩", &one)] {
            if v.len() != space.dim() {
                return Err(Error::Dimension(format!(
                    "{name}: codeword {label} has length {}",
                    v.len()
                )));
            }
            if (v.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidState(format!(
                    "{name}: codeword {label} has norm {}",
                    v.norm()
                )));
            }
            let leak: f64 = v.iter().skip(space.guarded_max() + 1).map(|z| z.norm_sqr()).sum();
            if leak > CODEWORD_LEAKAGE_TOL {
                return Err(Error::Leakage {
                    leakage: leak,
                    tolerance: CODEWORD_LEAKAGE_TOL,
                    context: format!("{name} codeword {label} in guard band"),
                });
            }
        }
        let overlap = zero.dotc(&one).norm();
        if overlap > 1e-10 {
            return Err(Error::InvalidState(format!(
                "{name}: codewords overlap by {overlap:.3e}"
            )));
        }
        Ok(Self {
            name,
            space,
            zero,
            one,
            params,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn zero(&self) -> &CVector {
        &self.zero
    }

    pub fn one(&self) -> &CVector {
        &self.one
    }

    pub fn codeword(&self, mu: usize) -> &CVector {
        if mu == 0 {
            &self.zero
        } else {
            &self.one
        }
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    /// `c0|0_L⟩ + c1|1_L⟩`.
    pub fn encode(&self, c0: C64, c1: C64) -> CVector {
        &self.zero * c0 + &self.one * c1
    }
}

/// Symmetric (Löwdin) orthonormalization of two unit vectors.
pub(crate) fn lowdin(u: &CVector, v: &CVector) -> Result<(CVector, CVector)> {
    let s = u.dotc(v);
    let m = s.norm();
    if m >= 1.0 - 1e-12 {
        return Err(Error::Numerical("codewords are linearly dependent".into()));
    }
    if m == 0.0 {
        return Ok((u.clone(), v.clone()));
    }
    // Gram matrix [[1, s], [s*, 1]] has eigenvalues 1 ± |s|; S^{-1/2} in closed form.
    let phase = s / m;
    let a = 0.5 * (1.0 / (1.0 + m).sqrt() + 1.0 / (1.0 - m).sqrt());
    let b = 0.5 * (1.0 / (1.0 + m).sqrt() - 1.0 / (1.0 - m).sqrt());
    let u2 = u * C64::new(a, 0.0) + v * (phase.conj() * b);
    let v2 = u * (phase * b) + v * C64::new(a, 0.0);
    Ok((u2, v2))
}
