//! In-place kernels applying single-factor operators to joint density
//! matrices without forming the lifted `K ⊗ I` matrices.

use super::space::strides;
use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// Operator that maps each basis state to at most one basis state with a
/// fixed index shift: `K|n⟩ = w_n |n + offset⟩`. Loss, gain and their
/// products all have this shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub offset: isize,
    pub weights: Vec<C64>,
}

impl Monomial {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn to_matrix(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (n, &w) in self.weights.iter().enumerate() {
            let t = n as isize + self.offset;
            if t >= 0 && (t as usize) < d {
                m[(t as usize, n)] = w;
            }
        }
        m
    }

    /// `self ∘ rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Monomial) -> Monomial {
        let d = self.dim();
        let mut weights = vec![C64::new(0.0, 0.0); d];
        for (n, w) in weights.iter_mut().enumerate() {
            let mid = n as isize + rhs.offset;
            if mid >= 0 && (mid as usize) < d {
                let out = mid + self.offset;
                if out >= 0 && (out as usize) < d {
                    *w = self.weights[mid as usize] * rhs.weights[n];
                }
            }
        }
        Monomial {
            offset: self.offset + rhs.offset,
            weights,
        }
    }

    /// Detects the monomial structure of a dense matrix.
    pub fn detect(m: &CMatrix) -> Option<Monomial> {
        let d = m.nrows();
        let mut offset: Option<isize> = None;
        let mut weights = vec![C64::new(0.0, 0.0); d];
        for c in 0..d {
            let mut hit = None;
            for r in 0..d {
                if m[(r, c)] != C64::new(0.0, 0.0) {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some(r);
                }
            }
            if let Some(r) = hit {
                let off = r as isize - c as isize;
                match offset {
                    Some(o) if o != off => return None,
                    _ => offset = Some(off),
                }
                weights[c] = m[(r, c)];
            }
        }
        Some(Monomial {
            offset: offset.unwrap_or(0),
            weights,
        })
    }
}

/// Single-factor operator in whichever representation is cheaper to apply.
#[derive(Clone, Debug, PartialEq)]
pub enum FactorOp {
    Monomial(Monomial),
    Dense(CMatrix),
}

impl FactorOp {
    pub fn from_matrix(m: CMatrix) -> Self {
        match Monomial::detect(&m) {
            Some(mono) => FactorOp::Monomial(mono),
            None => FactorOp::Dense(m),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FactorOp::Monomial(m) => m.dim(),
            FactorOp::Dense(m) => m.nrows(),
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        match self {
            FactorOp::Monomial(m) => m.to_matrix(),
            FactorOp::Dense(m) => m.clone(),
        }
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &FactorOp) -> FactorOp {
        match (self, rhs) {
            (FactorOp::Monomial(a), FactorOp::Monomial(b)) => FactorOp::Monomial(a.compose(b)),
            _ => FactorOp::from_matrix(self.to_matrix() * rhs.to_matrix()),
        }
    }
}

fn check(rho: &CMatrix, dims: &[usize], factor: usize, d: usize) -> Result<()> {
    let n: usize = dims.iter().product();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::Dimension(format!(
            "state dimension {} does not match factors {dims:?}",
            rho.nrows()
        )));
    }
    if factor >= dims.len() || dims[factor] != d {
        return Err(Error::Dimension(format!(
            "operator of dimension {d} cannot act on factor {factor} of {dims:?}"
        )));
    }
    Ok(())
}

/// `out += K ρ K†` with `K` acting on `factor`.
pub fn sandwich_add(
    rho: &CMatrix,
    dims: &[usize],
    factor: usize,
    op: &FactorOp,
    out: &mut CMatrix,
) -> Result<()> {
    check(rho, dims, factor, op.dim())?;
    let st = strides(dims)[factor];
    let d = dims[factor];
    let n = rho.nrows();
    match op {
        FactorOp::Monomial(mono) => {
            let mut target = vec![usize::MAX; n];
            let mut w = vec![C64::new(0.0, 0.0); n];
            for i in 0..n {
                let k = (i / st) % d;
                let t = k as isize + mono.offset;
                let wk = mono.weights[k];
                if t >= 0 && (t as usize) < d && wk != C64::new(0.0, 0.0) {
                    target[i] = (i as isize + mono.offset * st as isize) as usize;
                    w[i] = wk;
                }
            }
            let src = rho.as_slice();
            let dst = out.as_mut_slice();
            for j in 0..n {
                let tj = target[j];
                if tj == usize::MAX {
                    continue;
                }
                let wj = w[j].conj();
                let col = &src[j * n..(j + 1) * n];
                let dcol = tj * n;
                for i in 0..n {
                    let ti = target[i];
                    if ti != usize::MAX {
                        dst[dcol + ti] += w[i] * col[i] * wj;
                    }
                }
            }
        }
        FactorOp::Dense(k) => {
            let tmp = left_apply(rho, st, d, |_| k);
            let res = right_apply_adjoint(&tmp, st, d, |_| k);
            *out += res;
        }
    }
    Ok(())
}

/// `K ρ K†` for a single operator on `factor`.
pub fn sandwich(rho: &CMatrix, dims: &[usize], factor: usize, op: &FactorOp) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    sandwich_add(rho, dims, factor, op, &mut out)?;
    Ok(out)
}

/// `(u ⊗ I) ρ` style row mixing on one factor; `pick(i)` selects the local
/// matrix for the row block containing flat index `i`.
fn left_apply<'a>(
    rho: &CMatrix,
    st: usize,
    d: usize,
    pick: impl Fn(usize) -> &'a CMatrix,
) -> CMatrix {
    let n = rho.nrows();
    let mut out = CMatrix::zeros(n, n);
    let src = rho.as_slice();
    let dst = out.as_mut_slice();
    for i in 0..n {
        let k = (i / st) % d;
        let base = i - k * st;
        let u = pick(i);
        for x in 0..d {
            let ux = u[(k, x)];
            if ux == C64::new(0.0, 0.0) {
                continue;
            }
            let row = base + x * st;
            for j in 0..n {
                dst[j * n + i] += ux * src[j * n + row];
            }
        }
    }
    out
}

/// `ρ (u ⊗ I)†` column mixing; `pick(j)` selects the local matrix for the
/// column block containing flat index `j`.
fn right_apply_adjoint<'a>(
    rho: &CMatrix,
    st: usize,
    d: usize,
    pick: impl Fn(usize) -> &'a CMatrix,
) -> CMatrix {
    let n = rho.nrows();
    let mut out = CMatrix::zeros(n, n);
    let src = rho.as_slice();
    let dst = out.as_mut_slice();
    for j in 0..n {
        let k = (j / st) % d;
        let base = j - k * st;
        let u = pick(j);
        for y in 0..d {
            let uy = u[(k, y)].conj();
            if uy == C64::new(0.0, 0.0) {
                continue;
            }
            let col = base + y * st;
            let (dcol, scol) = (j * n, col * n);
            for i in 0..n {
                dst[dcol + i] += src[scol + i] * uy;
            }
        }
    }
    out
}

/// `U ρ U†` for a unitary (or any operator) on a single factor.
pub fn conjugate_local(rho: &CMatrix, dims: &[usize], factor: usize, u: &CMatrix) -> Result<CMatrix> {
    check(rho, dims, factor, u.nrows())?;
    let st = strides(dims)[factor];
    let d = dims[factor];
    let tmp = left_apply(rho, st, d, |_| u);
    Ok(right_apply_adjoint(&tmp, st, d, |_| u))
}

/// `U ρ U†` for `U = Σ_n |n⟩⟨n| ⊗ u_n`, a gate on `target` controlled by the
/// basis index of `control`.
pub fn conjugate_controlled(
    rho: &CMatrix,
    dims: &[usize],
    control: usize,
    target: usize,
    u: &[CMatrix],
) -> Result<CMatrix> {
    if control == target || control >= dims.len() || u.len() != dims[control] {
        return Err(Error::Dimension(format!(
            "controlled gate needs {} local blocks on a distinct target",
            dims.get(control).copied().unwrap_or(0)
        )));
    }
    let d = dims[target];
    if u.iter().any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(Error::Dimension("controlled block size".into()));
    }
    check(rho, dims, target, d)?;
    let st = strides(dims);
    let (sc, dc, stt) = (st[control], dims[control], st[target]);
    let tmp = left_apply(rho, stt, d, |i| &u[(i / sc) % dc]);
    Ok(right_apply_adjoint(&tmp, stt, d, |j| &u[(j / sc) % dc]))
}

/// Applies a full-space operator: `U ρ U†`.
pub fn conjugate_full(rho: &CMatrix, u: &CMatrix) -> Result<CMatrix> {
    if u.nrows() != rho.nrows() || u.ncols() != rho.ncols() {
        return Err(Error::Dimension("full-space operator size".into()));
    }
    Ok(u * rho * u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::operator::max_abs;

    fn rand_matrix(n: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(n, n, |_, _| C64::new(next(), next()))
    }

    fn lift(dims: &[usize], factor: usize, k: &CMatrix) -> CMatrix {
        let mut m = CMatrix::identity(1, 1);
        for (f, &d) in dims.iter().enumerate() {
            let local = if f == factor { k.clone() } else { CMatrix::identity(d, d) };
            m = m.kronecker(&local);
        }
        m
    }

    #[test]
    fn kernels_match_lifted_products() {
        let dims = [4, 2, 3];
        let rho = rand_matrix(24, 1);
        for f in 0..3 {
            let k = rand_matrix(dims[f], 10 + f as u64);
            let lifted = lift(&dims, f, &k);
            let expect = &lifted * &rho * lifted.adjoint();
            let got = sandwich(&rho, &dims, f, &FactorOp::Dense(k.clone())).unwrap();
            assert!(max_abs(&(&got - &expect)) < 1e-13);
            let got = conjugate_local(&rho, &dims, f, &k).unwrap();
            assert!(max_abs(&(&got - &expect)) < 1e-13);
        }
    }

    #[test]
    fn monomial_kernel_matches_dense() {
        let dims = [5, 2];
        let rho = rand_matrix(10, 4);
        for offset in [-2isize, 0, 1] {
            let mono = Monomial {
                offset,
                weights: (0..5).map(|n| C64::new(0.3 + n as f64, -0.1 * n as f64)).collect(),
            };
            let dense = mono.to_matrix();
            assert_eq!(Monomial::detect(&dense).unwrap().to_matrix(), dense);
            let lifted = lift(&dims, 0, &dense);
            let expect = &lifted * &rho * lifted.adjoint();
            let got = sandwich(&rho, &dims, 0, &FactorOp::Monomial(mono)).unwrap();
            assert!(max_abs(&(&got - &expect)) < 1e-13);
        }
    }

    #[test]
    fn monomial_composition() {
        let a = Monomial { offset: -1, weights: (0..6).map(|n| C64::new((n as f64).sqrt(), 0.0)).collect() };
        let b = Monomial { offset: 2, weights: (0..6).map(|n| C64::new(1.0 + n as f64, 0.5)).collect() };
        let c = a.compose(&b);
        let expect = a.to_matrix() * b.to_matrix();
        assert!(max_abs(&(c.to_matrix() - expect)) < 1e-14);
        assert!(Monomial::detect(&rand_matrix(3, 2)).is_none());
    }

    #[test]
    fn controlled_matches_block_diagonal() {
        let dims = [3, 2, 2];
        let rho = rand_matrix(12, 8);
        let blocks: Vec<CMatrix> = (0..3).map(|n| rand_matrix(2, 20 + n)).collect();
        let mut u = CMatrix::zeros(12, 12);
        for n in 0..3 {
            let local = CMatrix::identity(2, 2).kronecker(&blocks[n]);
            u.view_mut((n * 4, n * 4), (4, 4)).copy_from(&local);
        }
        let expect = &u * &rho * u.adjoint();
        let got = conjugate_controlled(&rho, &dims, 0, 2, &blocks).unwrap();
        assert!(max_abs(&(&got - &expect)) < 1e-13);
        assert!(conjugate_controlled(&rho, &dims, 0, 0, &blocks).is_err());
    }
}
