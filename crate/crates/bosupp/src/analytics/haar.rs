//! Exact low-order moments of Haar-random pure states and Bloch-sphere
//! quadrature for non-polynomial averages.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::fock::{CMatrix, C64};

/// `E[Π_j tr(ρ M_j)]` over Haar-random pure states `ρ` in dimension `d`,
/// for `t = M.len() ≤ 3`: the permutation sum
/// `Σ_π Π_cycles tr(Π_{j∈c} M_j) / (d(d+1)…(d+t−1))`.
pub fn haar_moment_trace(ms: &[CMatrix]) -> Result<C64> {
    let t = ms.len();
    if t == 0 || t > 3 {
        return Err(Error::Parameter(format!("Haar moments implemented for t = 1..3, got {t}")));
    }
    let d = ms[0].nrows();
    if ms.iter().any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(Error::Dimension("Haar moment matrices must share one square size".into()));
    }
    let tr = |m: &CMatrix| m.trace();
    let rising: f64 = (0..t).map(|i| (d + i) as f64).product();
    let sum = match t {
        1 => tr(&ms[0]),
        2 => tr(&ms[0]) * tr(&ms[1]) + tr(&(&ms[0] * &ms[1])),
        _ => {
            let (a, b, c) = (&ms[0], &ms[1], &ms[2]);
            tr(a) * tr(b) * tr(c)
                + tr(&(a * b)) * tr(c)
                + tr(&(a * c)) * tr(b)
                + tr(&(b * c)) * tr(a)
                + tr(&(a * b * c))
                + tr(&(a * c * b))
        }
    };
    Ok(sum / rising)
}

/// Average of `f(c0, c1)` over the Bloch sphere, `|ψ⟩ = c0|0⟩ + c1|1⟩` with
/// `c0 = cos(θ/2)` and `c1 = e^{iφ} sin(θ/2)`. Gauss-Legendre in θ and the
/// trapezoid rule in φ, doubled until successive estimates differ by less
/// than `tol`.
pub fn bloch_average(f: impl Fn(f64, C64) -> f64, tol: f64) -> Result<f64> {
    let mut prev = f64::NAN;
    let mut n = 8usize;
    while n <= 512 {
        let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("n > 0"));
        let m = 2 * n;
        let est = gl.integrate(0.0, std::f64::consts::PI, |theta| {
            let c0 = (0.5 * theta).cos();
            let s = (0.5 * theta).sin();
            let ring: f64 = (0..m)
                .map(|j| {
                    let phi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                    f(c0, C64::from_polar(s, phi))
                })
                .sum::<f64>()
                / m as f64;
            0.5 * theta.sin() * ring
        });
        if !est.is_finite() {
            return Err(Error::NonFinite("Bloch-sphere average".into()));
        }
        if (est - prev).abs() < tol {
            return Ok(est);
        }
        prev = est;
        n *= 2;
    }
    Err(Error::Numerical(format!("Bloch quadrature did not reach tolerance {tol}")))
}
