//! Success probabilities of the filtered channel and their convergence in
//! the number of ancillas.

use crate::channels::CvNoiseParams;
use crate::error::{Error, Result};
use crate::fock::linalg::ln_factorial;
use crate::fock::{CMatrix, C64};

fn diagonal(rho: &CMatrix) -> Result<Vec<f64>> {
    if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
        return Err(Error::Dimension("expected a square Fock-space matrix".into()));
    }
    Ok((0..rho.nrows()).map(|n| rho[(n, n)].re).collect())
}

/// `Σ_n ρ_nn r^n`.
pub fn number_power_trace(rho: &CMatrix, r: f64) -> Result<f64> {
    let d = diagonal(rho)?;
    let mut acc = 0.0;
    let mut rn = 1.0;
    for p in d {
        acc += p * rn;
        rn *= r;
    }
    Ok(acc)
}

/// `r = (1−2μG)/(2G−1)`, the base of the single-ancilla closed forms.
pub fn single_ancilla_ratio(params: CvNoiseParams) -> f64 {
    let g = params.gain();
    (1.0 - 2.0 * params.mu() * g) / (2.0 * g - 1.0)
}

/// `½ + tr{ρ r^{a†a}}/(2(2G−1))`.
pub fn psucc_single(rho: &CMatrix, params: CvNoiseParams) -> Result<f64> {
    let g = params.gain();
    let t = number_power_trace(rho, single_ancilla_ratio(params))?;
    Ok(0.5 * diagonal(rho)?.iter().sum::<f64>() + t / (2.0 * (2.0 * g - 1.0)))
}

/// Success probability of the `K`-ancilla filter from the sum over the
/// `2^K`-th roots `ω^j`, `ω = e^{iπ/2^{K−1}}`.
pub fn psucc_closed(rho: &CMatrix, params: CvNoiseParams, k: usize) -> Result<f64> {
    if k == 0 || k > 20 {
        return Err(Error::Parameter(format!("K={k} out of range")));
    }
    let d = diagonal(rho)?;
    let (x, y, z) = (params.x(), params.y(), params.z());
    let m = 1usize << k;
    let omega = C64::from_polar(1.0, std::f64::consts::PI / (1u64 << (k - 1)) as f64);
    let one = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..m {
        let w = omega.powu(j as u32);
        let zw = w.conj() * z;
        let base = (one + w * y + zw / (one - zw)) * x;
        let mut pw = one;
        let mut term = C64::new(0.0, 0.0);
        for &p in &d {
            term += pw * p;
            pw *= base;
        }
        acc += term / (one - zw);
    }
    let val = acc * ((1.0 - z) / m as f64);
    if val.im.abs() > 1e-12 {
        return Err(Error::Numerical(format!("ω-sum left an imaginary part {}", val.im)));
    }
    Ok(val.re)
}

/// Legendre polynomials `P_0..P_{n_max}` by the upward recurrence.
pub fn legendre(n_max: usize, t: f64) -> Vec<f64> {
    let mut p = vec![1.0; n_max + 1];
    if n_max >= 1 {
        p[1] = t;
    }
    for n in 1..n_max {
        p[n + 1] = ((2 * n + 1) as f64 * t * p[n] - n as f64 * p[n - 1]) / (n + 1) as f64;
    }
    p
}

/// `K → ∞` limit, `(1/G) Σ ρ_nn (1/G − μ)^n P_n((1−μ(2−G))/(1−μG))`.
pub fn psucc_asymptotic(rho: &CMatrix, params: CvNoiseParams) -> Result<f64> {
    let (mu, g) = (params.mu(), params.gain());
    let den = 1.0 - mu * g;
    if !(den > 0.0) {
        return Err(Error::Parameter(format!("1−μG = {den} must be positive")));
    }
    let d = diagonal(rho)?;
    let t = (1.0 - mu * (2.0 - g)) / den;
    let leg = legendre(d.len(), t);
    let r = 1.0 / g - mu;
    let mut acc = 0.0;
    let mut rn = 1.0;
    for (n, p) in d.iter().enumerate() {
        acc += p * rn * leg[n];
        rn *= r;
    }
    Ok(acc / g)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaP {
    /// Leading-order estimate from the `(2^K, 0)` and `(0, 2^K)` terms.
    pub bound: f64,
    /// `psucc_closed(K) − psucc_asymptotic`.
    pub exact: f64,
}

/// Gap between `K` ancillas and the asymptotic limit.
pub fn delta_p(rho: &CMatrix, params: CvNoiseParams, k: usize) -> Result<DeltaP> {
    let d = diagonal(rho)?;
    let m = 1usize << k;
    let (x, y, z, g) = (params.x(), params.y(), params.z(), params.gain());
    let ln_mf = ln_factorial(m);
    let mut bound = 0.0;
    for (n, p) in d.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let xn = x.powi(n as i32);
        // :(a†a)^M: = n!/(n−M)!, ⋮(a†a)^M⋮ = (n+M)!/n!
        if n >= m && y > 0.0 {
            bound += p * xn * (m as f64 * y.ln() + ln_factorial(n) - ln_factorial(n - m) - ln_mf).exp();
        }
        if z > 0.0 {
            bound += p * xn * (m as f64 * z.ln() + ln_factorial(n + m) - ln_factorial(n) - ln_mf).exp();
        }
    }
    Ok(DeltaP {
        bound: bound / g,
        exact: psucc_closed(rho, params, k)? - psucc_asymptotic(rho, params)?,
    })
}

/// Success probabilities of the remote protocol for the `00` and `11`
/// outcomes and their sum, for Bell-pair damping `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommPsucc {
    pub p00: f64,
    pub p11: f64,
    pub both: f64,
}

pub fn comm_psucc_closed(rho: &CMatrix, params: CvNoiseParams, p: f64) -> Result<CommPsucc> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("damping p={p} outside [0,1]")));
    }
    let d = diagonal(rho)?;
    let w: f64 = d.iter().sum();
    let g = params.gain();
    let r = single_ancilla_ratio(params);
    let s = 2.0 * g - 1.0;
    let t = number_power_trace(rho, r)?;
    let (mut odd, mut odd_r, mut even, mut even_r) = (0.0, 0.0, 0.0, 0.0);
    let mut rn = 1.0;
    for (n, q) in d.iter().enumerate() {
        if n % 2 == 1 {
            odd += q;
            odd_r += q * rn;
        } else {
            even += q;
            even_r += q * rn;
        }
        rn *= r;
    }
    let common = w * (1.0 + p) + (1.0 - p + 2.0 * p * p) * t / s;
    let p00 = 0.25 * (common - 2.0 * p * (odd + odd_r / s));
    let p11 = 0.25 * (common - 2.0 * p * (even + even_r / s));
    let both = 0.5 * w + (1.0 - 2.0 * p * (1.0 - p)) * t / (2.0 * s);
    Ok(CommPsucc { p00, p11, both })
}
