//! Small dense linear-algebra helpers on complex matrices.

use super::{CMatrix, C64};
use nalgebra::{DVector, SymmetricEigen};

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues
/// and the unitary whose columns are the eigenvectors.
pub fn eigh(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(idx.len(), idx.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = CMatrix::zeros(m.nrows(), m.ncols());
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// `exp(G)` for anti-Hermitian `G`, through the eigenbasis of `-iG`.
/// The result is unitary to rounding.
pub fn expm_anti_hermitian(g: &CMatrix) -> CMatrix {
    let h = g * C64::new(0.0, -1.0);
    let (vals, v) = eigh(&h);
    let mut scaled = v.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= C64::from_polar(1.0, vals[k]);
    }
    &scaled * v.adjoint()
}

/// `f(H)` for Hermitian `H` and a real scalar function.
pub fn hermitian_function(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, v) = eigh(h);
    let mut scaled = v.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= C64::new(f(vals[k]), 0.0);
    }
    &scaled * v.adjoint()
}

/// General matrix exponential (Padé scaling and squaring).
pub fn expm(m: &CMatrix) -> CMatrix {
    m.exp()
}

/// `ln n!` by direct summation (exact enough for the ranges used here).
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}
