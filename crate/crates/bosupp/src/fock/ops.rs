use super::linalg::{expm_anti_hermitian, ln_factorial};
use super::operator::{max_abs, Operator};
use super::space::{strides, CompositeSpace, FockSpace};
use super::state::{trace_product, State};
use super::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// Annihilation and creation operators. `a†|N_max⟩` is truncated to zero.
pub fn ladder(space: FockSpace) -> (Operator, Operator) {
    let d = space.dim();
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    (
        Operator::new_unchecked(space.into(), a),
        Operator::new_unchecked(space.into(), ad),
    )
}

/// Diagonal operator `f(a†a)`.
pub fn number_function(space: FockSpace, f: impl Fn(usize) -> f64) -> Result<Operator> {
    number_function_complex(space, |n| C64::new(f(n), 0.0))
}

/// Diagonal operator with complex entries `f(n)`.
pub fn number_function_complex(space: FockSpace, f: impl Fn(usize) -> C64) -> Result<Operator> {
    let d = space.dim();
    let mut m = CMatrix::zeros(d, d);
    for n in 0..d {
        let v = f(n);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite(format!("f({n}) = {v}")));
        }
        m[(n, n)] = v;
    }
    Ok(Operator::new_unchecked(space.into(), m))
}

/// Fock basis vector `|n⟩`.
pub fn fock_ket(space: FockSpace, n: usize) -> Result<CVector> {
    if n >= space.dim() {
        return Err(Error::Parameter(format!(
            "Fock level {n} outside dimension {}",
            space.dim()
        )));
    }
    let mut v = CVector::zeros(space.dim());
    v[n] = C64::new(1.0, 0.0);
    Ok(v)
}

/// Coherent state `|β⟩` from its analytic Fock amplitudes, truncated (not
/// renormalized).
pub fn coherent_ket(space: FockSpace, beta: C64) -> CVector {
    let r = beta.norm();
    CVector::from_fn(space.dim(), |n, _| {
        if n == 0 {
            return C64::new((-0.5 * r * r).exp(), 0.0);
        }
        if r == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let mag = (-0.5 * r * r + n as f64 * r.ln() - 0.5 * ln_factorial(n)).exp();
        C64::from_polar(mag, n as f64 * beta.arg())
    })
}

fn unitarity_deficit(space: FockSpace, u: &CMatrix) -> f64 {
    let g = space.guarded_max() + 1;
    let p = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..g {
        for j in 0..g {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

fn checked_unitary(space: FockSpace, u: CMatrix, what: &str) -> Result<Operator> {
    let deficit = unitarity_deficit(space, &u);
    if deficit > 1e-6 {
        return Err(Error::Leakage {
            leakage: deficit,
            tolerance: 1e-6,
            context: format!("{what} unitarity on guarded subspace"),
        });
    }
    Operator::new(space, u)
}

/// Displacement `D(β) = exp(βa† − β*a)` on the truncated space.
pub fn displacement(space: FockSpace, beta: C64) -> Result<Operator> {
    let (a, ad) = ladder(space);
    let g = ad.matrix() * beta - a.matrix() * beta.conj();
    checked_unitary(space, expm_anti_hermitian(&g), "displacement")
}

/// Squeezing `S(r, φ) = exp(r/2 (e^{−2iφ}a² − e^{2iφ}a†²))`.
pub fn squeeze(space: FockSpace, r: f64, phi: f64) -> Result<Operator> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Parameter(format!("squeezing r = {r}")));
    }
    let (a, ad) = ladder(space);
    let a2 = a.matrix() * a.matrix();
    let ad2 = ad.matrix() * ad.matrix();
    let g = a2 * C64::from_polar(0.5 * r, -2.0 * phi) - ad2 * C64::from_polar(0.5 * r, 2.0 * phi);
    checked_unitary(space, expm_anti_hermitian(&g), "squeeze")
}

/// Kronecker product in the fixed factor ordering.
pub fn tensor(ops: &[&Operator]) -> Result<Operator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::Dimension("empty tensor product".into()))?;
    let fock = first.space().fock_space();
    let mut qudits: Vec<usize> = first.space().ancillas().to_vec();
    let mut m = first.matrix().clone();
    for op in rest {
        if op.space().fock_space().is_some() {
            return Err(Error::Dimension(
                "a Fock factor must come first in a tensor product".into(),
            ));
        }
        qudits.extend_from_slice(op.space().ancillas());
        m = m.kronecker(op.matrix());
    }
    Ok(Operator::new_unchecked(
        CompositeSpace::from_parts(fock, qudits),
        m,
    ))
}

/// Reduced state on the factors listed in `keep` (increasing indices).
pub fn partial_trace(state: &State, keep: &[usize]) -> Result<State> {
    let space = state.space();
    let kept_space = space.select(keep)?;
    let dims = space.factor_dims();
    let st = strides(&dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !keep.contains(f)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let nk: usize = kept_dims.iter().product();
    let nt: usize = traced_dims.iter().product();
    let offsets = |idx: usize, fs: &[usize], fd: &[usize]| -> usize {
        let mut rem = idx;
        let mut off = 0;
        for (pos, &f) in fs.iter().enumerate().rev() {
            let d = fd[pos];
            off += (rem % d) * st[f];
            rem /= d;
        }
        off
    };
    let kept_off: Vec<usize> = (0..nk).map(|i| offsets(i, keep, &kept_dims)).collect();
    let traced_off: Vec<usize> = (0..nt).map(|i| offsets(i, &traced, &traced_dims)).collect();
    let m = state.matrix();
    let mut out = CMatrix::zeros(nk, nk);
    for j in 0..nk {
        for i in 0..nk {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += m[(kept_off[i] + t, kept_off[j] + t)];
            }
            out[(i, j)] = acc;
        }
    }
    State::from_matrix(kept_space, out)
}

/// `⟨ψ|ρ|ψ⟩` for a pure, unit-weight reference `|ψ⟩⟨ψ|` and normalized `ρ`.
pub fn fidelity(reference: &State, rho: &State) -> Result<f64> {
    if reference.space() != rho.space() {
        return Err(Error::Dimension("fidelity between different spaces".into()));
    }
    if (reference.weight() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!(
            "reference weight {} is not 1",
            reference.weight()
        )));
    }
    let purity = trace_product(reference.matrix(), reference.matrix()).re;
    if (purity - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!(
            "reference is not pure (purity {purity})"
        )));
    }
    if (rho.weight() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidState(format!(
            "state weight {} is not normalized",
            rho.weight()
        )));
    }
    Ok(trace_product(reference.matrix(), rho.matrix()).re)
}

/// `⟨ψ|ρ|ψ⟩` for a ket reference.
pub fn ket_fidelity(psi: &CVector, rho: &CMatrix) -> f64 {
    psi.dotc(&(rho * psi)).re
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ordering {
    /// `:e^{λ a†a}: = Σ_k λ^k a†^k a^k / k!`
    Normal,
    /// `⋮e^{λ a†a}⋮ = Σ_k λ^k a^k a†^k / k!`
    Antinormal,
}

/// Closed forms of the ordered exponentials of the number operator:
/// `(1+λ)^{a†a}` (normal) and `(1−λ)^{−a†a−1}` (antinormal).
pub fn ordered_power_identity(lambda: f64, ordering: Ordering, space: FockSpace) -> Result<Operator> {
    match ordering {
        Ordering::Normal => number_function(space, |n| (1.0 + lambda).powi(n as i32)),
        Ordering::Antinormal => {
            if lambda.abs() >= 1.0 {
                return Err(Error::Parameter(format!(
                    "antinormal ordered exponential needs |λ| < 1, got {lambda}"
                )));
            }
            number_function(space, |n| (1.0 - lambda).powi(-(n as i32) - 1))
        }
    }
}

/// Largest deviation of `[a, a†]` from the identity on the guarded levels.
pub fn commutator_deficit(space: FockSpace) -> f64 {
    let (a, ad) = ladder(space);
    let c = a.matrix() * ad.matrix() - ad.matrix() * a.matrix();
    let g = space.guarded_max() + 1;
    let id = CMatrix::identity(g, g);
    max_abs(&(c.view((0, 0), (g, g)) - id))
}
