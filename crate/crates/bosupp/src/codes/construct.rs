use super::{lowdin, BosonicCode, CodeParams};
use crate::error::{Error, Result};
use crate::fock::linalg::ln_factorial;
use crate::fock::{squeeze, CVector, FockSpace, C64};
use std::f64::consts::PI;

/// Smallest residue-class probability of a coherent state that still
/// yields a numerically meaningful codeword.
const MIN_COMPONENT_WEIGHT: f64 = 1e-24;

/// Normalized truncated vector from log-amplitudes; also returns the weight
/// fraction sitting above `guarded_max` (computed against the untruncated
/// list, which may extend past the space).
fn from_log_amplitudes(space: FockSpace, logs: &[(usize, f64, f64)]) -> (CVector, f64, f64) {
    // (level, ln|c|, phase)
    let peak = logs.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let mut v = CVector::zeros(space.dim());
    let mut total = 0.0;
    let mut above = 0.0;
    for &(m, l, ph) in logs {
        let w = (2.0 * (l - peak)).exp();
        total += w;
        if m > space.guarded_max() {
            above += w;
        }
        if m < space.dim() {
            v[m] = C64::from_polar((l - peak).exp(), ph);
        }
    }
    let norm = v.norm();
    (v / C64::new(norm, 0.0), above / total, peak)
}

/// Cat-code codeword on residue `r` modulo `n`, as log-amplitudes up to
/// `m_max`.
fn cat_logs(n: usize, r: usize, alpha: f64, m_max: usize) -> Vec<(usize, f64, f64)> {
    (r..=m_max)
        .step_by(n)
        .map(|m| (m, m as f64 * alpha.ln() - 0.5 * ln_factorial(m), 0.0))
        .collect()
}

/// Levels needed to capture a Poisson-like tail with mean `mean`.
fn tail_levels(mean: f64, dim: usize) -> usize {
    (dim + 40).max((mean + 12.0 * mean.sqrt() + 60.0).ceil() as usize)
}

/// `n`-component cat code with amplitude `alpha`. `|0_L⟩` lives on Fock
/// levels `≡ 0 (mod n)` and `|1_L⟩` on levels `≡ n/2 (mod n)`.
pub fn cat_code(n: usize, alpha: f64, space: FockSpace) -> Result<BosonicCode> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Parameter(format!(
            "cat code needs an even component count, got {n}"
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Parameter(format!("cat amplitude {alpha}")));
    }
    let (zero, one) = cat_vectors(n, alpha, space)?;
    BosonicCode::new(
        format!("cat({n},{alpha})"),
        space,
        zero,
        one,
        CodeParams::Cat { n, alpha },
    )
}

fn cat_vectors(n: usize, alpha: f64, space: FockSpace) -> Result<(CVector, CVector)> {
    let m_max = tail_levels(alpha * alpha, space.dim());
    let mut out = Vec::with_capacity(2);
    for r in [0, n / 2] {
        let logs = cat_logs(n, r, alpha, m_max);
        let (v, leak, peak) = from_log_amplitudes(space, &logs);
        // Probability of the residue class in the coherent state |α⟩.
        let class_weight: f64 = logs.iter().map(|t| (2.0 * (t.1 - peak)).exp()).sum::<f64>();
        let ln_weight = -alpha * alpha + 2.0 * peak + class_weight.ln();
        if ln_weight < MIN_COMPONENT_WEIGHT.ln() {
            return Err(Error::Numerical(format!(
                "cat({n},{alpha}) codeword on residue {r} has weight e^{ln_weight:.1}; amplitude too small"
            )));
        }
        if leak > super::CODEWORD_LEAKAGE_TOL {
            return Err(Error::Leakage {
                leakage: leak,
                tolerance: super::CODEWORD_LEAKAGE_TOL,
                context: format!("cat({n},{alpha}) beyond the guarded subspace"),
            });
        }
        out.push(v);
    }
    let one = out.pop().unwrap();
    let zero = out.pop().unwrap();
    Ok((zero, one))
}

/// Binomial code with spacing `n` and top index `kappa`:
/// `|0_L⟩ ∝ Σ_{j even} √C(κ,j)|jn⟩`, `|1_L⟩ ∝ Σ_{j odd} √C(κ,j)|jn⟩`.
pub fn binomial_code(n: usize, kappa: usize, space: FockSpace) -> Result<BosonicCode> {
    if n == 0 || kappa == 0 {
        return Err(Error::Parameter(format!("bin({n},{kappa})")));
    }
    if kappa * n > space.guarded_max() {
        return Err(Error::Leakage {
            leakage: 1.0,
            tolerance: super::CODEWORD_LEAKAGE_TOL,
            context: format!(
                "bin({n},{kappa}) support reaches {} above guarded level {}",
                kappa * n,
                space.guarded_max()
            ),
        });
    }
    let mut zero = CVector::zeros(space.dim());
    let mut one = CVector::zeros(space.dim());
    for j in 0..=kappa {
        let c = crate::fock::linalg::binomial(kappa, j).sqrt();
        if j % 2 == 0 {
            zero[j * n] = C64::new(c, 0.0);
        } else {
            one[j * n] = C64::new(c, 0.0);
        }
    }
    let zero = zero.normalize();
    let one = one.normalize();
    BosonicCode::new(
        format!("bin({n},{kappa})"),
        space,
        zero,
        one,
        CodeParams::Binomial { n, kappa },
    )
}

/// Hermite functions `ψ_0..ψ_{m_max}` at `x` (x = (a+a†)/√2 convention).
fn hermite_functions(x: f64, m_max: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(m_max + 1);
    psi.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if m_max >= 1 {
        psi.push(2f64.sqrt() * x * psi[0]);
    }
    for m in 1..m_max {
        let next = (2.0 / (m + 1) as f64).sqrt() * x * psi[m]
            - (m as f64 / (m + 1) as f64).sqrt() * psi[m - 1];
        psi.push(next);
    }
    psi
}

/// Finite-energy square GKP code `e^{−Δ²a†a}` applied to the position
/// lattice `Σ_s |x = √π(2s+μ)⟩`, followed by Löwdin orthogonalization.
///
/// Peaks are taken in their zero-width limit, so Fock amplitudes are
/// lattice sums of Hermite functions. The lattice is symmetric about the
/// origin and extends until the omitted peaks are negligible for every
/// computed level.
pub fn gkp_code(delta: f64, space: FockSpace) -> Result<BosonicCode> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("GKP Δ = {delta} outside (0, 1)")));
    }
    let (zero, one) = gkp_raw(delta, space)?;
    let (zero, one) = lowdin(&zero, &one)?;
    BosonicCode::new(
        format!("gkp({delta})"),
        space,
        zero.normalize(),
        one.normalize(),
        CodeParams::Gkp { delta },
    )
}

/// Unorthogonalized, normalized finite-energy GKP codewords.
pub(crate) fn gkp_raw(delta: f64, space: FockSpace) -> Result<(CVector, CVector)> {
    let d2 = delta * delta;
    // Levels beyond which e^{−2Δ²m} makes the tail irrelevant.
    let m_ext = ((50.0 / d2).ceil() as usize).max(space.dim() + 20).min(4000);
    let x_max = (2.0 * m_ext as f64 + 80.0).sqrt();
    let s_max = (x_max / (2.0 * PI.sqrt())).ceil() as i64 + 1;
    let mut out = Vec::with_capacity(2);
    for mu in [0i64, 1] {
        let mut amps = vec![0.0; m_ext + 1];
        for s in -s_max - mu..=s_max {
            let x = PI.sqrt() * (2 * s + mu) as f64;
            for (m, h) in hermite_functions(x, m_ext).into_iter().enumerate() {
                amps[m] += h;
            }
        }
        let logs: Vec<(usize, f64, f64)> = amps
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(m, a)| {
                let phase = if *a < 0.0 { PI } else { 0.0 };
                (m, a.abs().ln() - d2 * m as f64, phase)
            })
            .collect();
        let (v, leak, _) = from_log_amplitudes(space, &logs);
        if leak > super::CODEWORD_LEAKAGE_TOL {
            return Err(Error::Leakage {
                leakage: leak,
                tolerance: super::CODEWORD_LEAKAGE_TOL,
                context: format!(
                    "gkp({delta}) codeword beyond level {}; increase the Fock dimension",
                    space.guarded_max()
                ),
            });
        }
        out.push(v);
    }
    let one = out.pop().unwrap();
    let zero = out.pop().unwrap();
    Ok((zero, one))
}

/// Cat codewords squeezed by `S(r, 0)` with `r = ln(10^{dB/20})`, then
/// re-orthonormalized.
pub fn squeezed_cat(n: usize, alpha: f64, db: f64, space: FockSpace) -> Result<BosonicCode> {
    if !(db >= 0.0) || !db.is_finite() {
        return Err(Error::Parameter(format!("squeezing {db} dB")));
    }
    // Validates the parameters and the unsqueezed truncation.
    cat_code(n, alpha, space)?;
    let r = (10f64.powf(db / 20.0)).ln();
    // Squeeze in a larger space so the top of the working space is not
    // distorted by the truncated generator.
    let ext_dim = (2 * space.dim()).max(space.dim() + 40);
    let ext = FockSpace::new(ext_dim, space.guard())?;
    let (z_ext, o_ext) = cat_vectors(n, alpha, ext)?;
    let s = squeeze(ext, r, 0.0)?;
    let mut words = Vec::with_capacity(2);
    for v in [z_ext, o_ext] {
        let w = s.apply(&v)?;
        let leak: f64 = w.iter().skip(space.guarded_max() + 1).map(|z| z.norm_sqr()).sum();
        if leak > super::CODEWORD_LEAKAGE_TOL {
            return Err(Error::Leakage {
                leakage: leak,
                tolerance: super::CODEWORD_LEAKAGE_TOL,
                context: format!("sqcat({n},{alpha},{db}dB) beyond the guarded subspace"),
            });
        }
        words.push(w.rows(0, space.dim()).into_owned().normalize());
    }
    let (zero, one) = lowdin(&words[0], &words[1])?;
    BosonicCode::new(
        format!("sqcat({n},{alpha},{db}dB)"),
        space,
        zero.normalize(),
        one.normalize(),
        CodeParams::SqueezedCat { n, alpha, db },
    )
}

/// Parsed code descriptor such as `cat(2,2)`, `sqcat(2,2,6dB)`, `bin(2,4)`
/// or `gkp(0.3)`.
#[derive(Clone, Debug, PartialEq)]
pub enum CodeSpec {
    Cat { n: usize, alpha: f64 },
    SqueezedCat { n: usize, alpha: f64, db: f64 },
    Binomial { n: usize, kappa: usize },
    Gkp { delta: f64 },
}

impl CodeSpec {
    pub fn build(&self, space: FockSpace) -> Result<BosonicCode> {
        match *self {
            CodeSpec::Cat { n, alpha } => cat_code(n, alpha, space),
            CodeSpec::SqueezedCat { n, alpha, db } => squeezed_cat(n, alpha, db, space),
            CodeSpec::Binomial { n, kappa } => binomial_code(n, kappa, space),
            CodeSpec::Gkp { delta } => gkp_code(delta, space),
        }
    }
}

impl std::fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CodeSpec::Cat { n, alpha } => write!(f, "cat({n},{alpha})"),
            CodeSpec::SqueezedCat { n, alpha, db } => write!(f, "sqcat({n},{alpha},{db}dB)"),
            CodeSpec::Binomial { n, kappa } => write!(f, "bin({n},{kappa})"),
            CodeSpec::Gkp { delta } => write!(f, "gkp({delta})"),
        }
    }
}

impl std::str::FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let d = crate::descriptor::Descriptor::parse(s)?;
        let spec = match d.name.as_str() {
            "cat" => {
                d.expect_arity(2)?;
                CodeSpec::Cat {
                    n: d.usize_at(0)?,
                    alpha: d.f64_at(1)?,
                }
            }
            "sqcat" => {
                d.expect_arity(3)?;
                CodeSpec::SqueezedCat {
                    n: d.usize_at(0)?,
                    alpha: d.f64_at(1)?,
                    db: d.db_at(2)?,
                }
            }
            "bin" => {
                d.expect_arity(2)?;
                CodeSpec::Binomial {
                    n: d.usize_at(0)?,
                    kappa: d.usize_at(1)?,
                }
            }
            "gkp" => {
                d.expect_arity(1)?;
                CodeSpec::Gkp { delta: d.f64_at(0)? }
            }
            other => return Err(Error::Parse(format!("unknown code '{other}'"))),
        };
        Ok(spec)
    }
}
