//! Second-order expansion of the single-ancilla heralded state in the loss
//! parameter `μ` and gain parameter `z`.

use crate::error::{Error, Result};
use crate::fock::linalg::ln_factorial;
use crate::fock::{ladder, number_function, CMatrix, FockSpace, State, C64};

use crate::protocols::passes_filter;

/// Coefficient tables indexed `[j][k]` for `z^j μ^k`, `j + k ≤ 2`.
///
/// `p` expands the unnormalized state, `c` its trace, `q` the inverse of the
/// trace and `r` the normalized state.
#[derive(Clone, Debug)]
pub struct PerturbativeExpansion {
    pub p: [[CMatrix; 3]; 3],
    pub c: [[f64; 3]; 3],
    pub q: [[f64; 3]; 3],
    pub r: [[CMatrix; 3]; 3],
    space: FockSpace,
}

fn zeros3(d: usize) -> [[CMatrix; 3]; 3] {
    std::array::from_fn(|_| std::array::from_fn(|_| CMatrix::zeros(d, d)))
}

fn anti(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

impl PerturbativeExpansion {
    pub fn new(rho: &State) -> Result<Self> {
        let space = rho
            .space()
            .fock_space()
            .filter(|_| rho.space().n_factors() == 1)
            .ok_or_else(|| Error::Dimension("expansion needs a single-mode state".into()))?;
        let d = space.dim();
        let r0 = rho.matrix().clone();
        let (a, ad) = ladder(space);
        let (a, ad) = (a.into_matrix(), ad.into_matrix());
        let n = number_function(space, |k| k as f64)?.into_matrix();
        let t1 = number_function(space, |k| k as f64 / 2.0)?.into_matrix();
        let t21 = number_function(space, |k| (k * k) as f64 / 4.0)?.into_matrix();
        let t22 = number_function(space, |k| k as f64 * (k as f64 - 2.0) / 8.0)?.into_matrix();
        let a2 = &a * &a;
        let ad2 = &ad * &ad;
        let half = C64::new(0.5, 0.0);

        let mut p = zeros3(d);
        p[0][0] = r0.clone();
        p[1][0] = -(&r0 + anti(&t1, &r0));
        p[0][1] = -anti(&t1, &r0);
        p[1][1] = anti(&t1, &r0) + anti(&t21, &r0) + &t1 * &r0 * &t1 * C64::new(2.0, 0.0) + &n * &r0 * &n;
        p[2][0] = anti(&t1, &r0) + anti(&t22, &r0) + &t1 * &r0 * &t1 + &ad2 * &r0 * &a2 * half;
        p[0][2] = anti(&t22, &r0) + &t1 * &r0 * &t1 + &a2 * &r0 * &ad2 * half;

        let mut c = [[0.0; 3]; 3];
        for (j, row) in c.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                if j + k <= 2 {
                    *v = p[j][k].trace().re;
                }
            }
        }
        let c0 = c[0][0];
        if !(c0 > 0.0) {
            return Err(Error::InvalidState("zero-weight state".into()));
        }
        let mut q = [[0.0; 3]; 3];
        q[0][0] = 1.0 / c0;
        q[1][0] = -c[1][0] / (c0 * c0);
        q[0][1] = -c[0][1] / (c0 * c0);
        q[1][1] = (2.0 * c[0][1] * c[1][0] - c0 * c[1][1]) / c0.powi(3);
        q[2][0] = (c[1][0] * c[1][0] - c0 * c[2][0]) / c0.powi(3);
        q[0][2] = (c[0][1] * c[0][1] - c0 * c[0][2]) / c0.powi(3);

        let mut r = zeros3(d);
        for a in 0..3 {
            for b in 0..3 - a {
                for j in 0..=a {
                    for k in 0..=b {
                        r[a][b] += &p[j][k] * C64::new(q[a - j][b - k], 0.0);
                    }
                }
            }
        }
        Ok(Self { p, c, q, r, space })
    }

    fn sum(tables: &[[CMatrix; 3]; 3], mu: f64, z: f64) -> CMatrix {
        let d = tables[0][0].nrows();
        let mut out = CMatrix::zeros(d, d);
        for j in 0..3 {
            for k in 0..3 - j {
                out += &tables[j][k] * C64::new(z.powi(j as i32) * mu.powi(k as i32), 0.0);
            }
        }
        out
    }

    /// Second-order unnormalized heralded state.
    pub fn unnormalized(&self, mu: f64, z: f64) -> CMatrix {
        Self::sum(&self.p, mu, z)
    }

    pub fn p_succ(&self, mu: f64, z: f64) -> f64 {
        let mut acc = 0.0;
        for j in 0..3 {
            for k in 0..3 - j {
                acc += self.c[j][k] * z.powi(j as i32) * mu.powi(k as i32);
            }
        }
        acc
    }

    /// Second-order normalized heralded state.
    pub fn normalized(&self, mu: f64, z: f64) -> Result<State> {
        State::from_matrix(self.space, Self::sum(&self.r, mu, z))
    }
}

/// Normalized heralded state of the single-ancilla filter to second order.
pub fn perturbative_state(rho: &State, mu: f64, z: f64) -> Result<State> {
    PerturbativeExpansion::new(rho)?.normalized(mu, z)
}

const FORMAL_ORDER: usize = 12;

/// The filtered sum `Σ_{(l−k) ≡ 0 mod 2^K} L_{l,k} ρ L_{l,k}†` continued to
/// any real `(μ, z)` near zero, including negative values, with jumps up to
/// twelve photons each way. Only meant for small parameters.
pub fn formal_filtered(rho: &CMatrix, mu: f64, z: f64, k_anc: usize) -> Result<CMatrix> {
    let d = rho.nrows();
    if rho.ncols() != d {
        return Err(Error::Dimension("square matrix expected".into()));
    }
    if mu.abs() >= 0.5 || z.abs() >= 0.5 {
        return Err(Error::Parameter("formal expansion needs |μ|, |z| < 0.5".into()));
    }
    let x = (1.0 - mu) * (1.0 - z);
    let mut out = CMatrix::zeros(d, d);
    for l in 0..=FORMAL_ORDER {
        for k in 0..=FORMAL_ORDER {
            if !passes_filter(l as isize - k as isize, k_anc) {
                continue;
            }
            // c²_{l,k} = (1−z) z^k μ^l / ((1−z)^k (1−μ)^k k! l!)
            let c2 = (1.0 - z) * z.powi(k as i32) * mu.powi(l as i32)
                / (((1.0 - z) * (1.0 - mu)).powi(k as i32))
                * (-(ln_factorial(k) + ln_factorial(l))).exp();
            if c2 == 0.0 {
                continue;
            }
            // Amplitude of x^{m/2} a†^k a^l on |n⟩, m = n − l + k.
            let amp: Vec<f64> = (0..d)
                .map(|n| {
                    if n < l || n - l + k >= d {
                        return 0.0;
                    }
                    let m = n - l + k;
                    let ln = 0.5 * (ln_factorial(n) + ln_factorial(m)) - ln_factorial(n - l);
                    ln.exp() * x.powf(m as f64 / 2.0)
                })
                .collect();
            for j in 0..d {
                if amp[j] == 0.0 {
                    continue;
                }
                let mj = j + k - l;
                for i in 0..d {
                    if amp[i] == 0.0 {
                        continue;
                    }
                    let mi = i + k - l;
                    out[(mi, mj)] += rho[(i, j)] * (c2 * amp[i] * amp[j]);
                }
            }
        }
    }
    Ok(out)
}

/// Normalized fidelity `⟨ψ|ρ′|ψ⟩/tr ρ′` of the formal filtered state.
fn formal_fidelity(rho: &CMatrix, mu: f64, z: f64, k_anc: usize) -> Result<f64> {
    let out = formal_filtered(rho, mu, z, k_anc)?;
    Ok((rho * &out).trace().re / out.trace().re)
}

/// Central-difference derivatives of the normalized fidelity in `μ` and `z`
/// at zero, step `h` with one Richardson refinement.
pub fn fidelity_linear_coefficients(rho: &State, k_anc: usize, h: f64) -> Result<(f64, f64)> {
    let m = rho.matrix();
    let deriv = |along_mu: bool| -> Result<f64> {
        let f = |s: f64| {
            if along_mu {
                formal_fidelity(m, s, 0.0, k_anc)
            } else {
                formal_fidelity(m, 0.0, s, k_anc)
            }
        };
        let d1 = (f(h)? - f(-h)?) / (2.0 * h);
        let d2 = (f(h / 2.0)? - f(-h / 2.0)?) / h;
        Ok((4.0 * d2 - d1) / 3.0)
    };
    Ok((deriv(true)?, deriv(false)?))
}
