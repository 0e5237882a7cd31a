use super::{compose, fock_target, Jump, KrausChannel, KrausLabel, KrausOp};
use crate::error::{Error, Result};
use crate::fock::apply::{FactorOp, Monomial};
use crate::fock::linalg::ln_binomial;
use crate::fock::{FockSpace, C64};

const LOSS_TAIL_TOL: f64 = 1e-14;
const GAIN_TERM_TOL: f64 = 1e-17;

/// Loss rate `mu` followed by quantum-limited amplification with gain `G`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CvNoiseParams {
    mu: f64,
    gain: f64,
}

impl CvNoiseParams {
    pub fn new(mu: f64, gain: f64) -> Result<Self> {
        if !mu.is_finite() || !gain.is_finite() {
            return Err(Error::NonFinite("noise parameters".into()));
        }
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::Parameter(format!("loss rate mu={mu} outside [0,1)")));
        }
        if gain < 1.0 {
            return Err(Error::Parameter(format!("gain G={gain} below 1")));
        }
        if mu * gain > 1.0 + 1e-12 {
            return Err(Error::Parameter(format!("unphysical noise: mu*G = {} > 1", mu * gain)));
        }
        Ok(Self { mu, gain })
    }

    pub fn loss(mu: f64) -> Result<Self> {
        Self::new(mu, 1.0)
    }

    /// `G = 1 + η n̄`, `μ = 1 − (1−η)/G`.
    pub fn thermal(eta: f64, nbar: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eta) || !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::Parameter(format!("thermal noise needs eta in [0,1), nbar >= 0 (got {eta}, {nbar})")));
        }
        let gain = 1.0 + eta * nbar;
        Self::new(1.0 - (1.0 - eta) / gain, gain)
    }

    /// Gaussian displacement noise of variance `η/(1−η)`: `G = 1/(1−η)`, `μ = η`.
    pub fn gdn(eta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::Parameter(format!("gdn eta={eta} outside [0,1)")));
        }
        Self::new(eta, 1.0 / (1.0 - eta))
    }

    /// Parameterized by `μ` and `z = 1 − 1/G`.
    pub fn from_mu_z(mu: f64, z: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&z) {
            return Err(Error::Parameter(format!("z={z} outside [0,1)")));
        }
        Self::new(mu, 1.0 / (1.0 - z))
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// `(1−μ)/G`
    pub fn x(&self) -> f64 {
        (1.0 - self.mu) / self.gain
    }

    /// `μG/(1−μ)`
    pub fn y(&self) -> f64 {
        self.mu * self.gain / (1.0 - self.mu)
    }

    /// `1 − 1/G`
    pub fn z(&self) -> f64 {
        1.0 - 1.0 / self.gain
    }
}

/// Weights of `A_l`: `|w_n|² = C(n,l) μ^l (1−μ)^{n−l}` mapping `n → n−l`.
pub(crate) fn loss_weights(mu: f64, l: usize, dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|n| {
            if n < l {
                return C64::new(0.0, 0.0);
            }
            let mut lw = ln_binomial(n, l);
            if l > 0 {
                lw += l as f64 * mu.ln();
            }
            if n > l {
                lw += (n - l) as f64 * (-mu).ln_1p();
            }
            C64::new((0.5 * lw).exp(), 0.0)
        })
        .collect()
}

/// Weights of `B_k`: `|w_n|² = C(n+k,k) z^k G^{−n−1}` mapping `n → n+k`,
/// zero when `n+k` leaves the truncated space.
pub(crate) fn gain_weights(gain: f64, k: usize, dim: usize) -> Vec<C64> {
    let z = 1.0 - 1.0 / gain;
    (0..dim)
        .map(|n| {
            if n + k >= dim {
                return C64::new(0.0, 0.0);
            }
            let mut lw = ln_binomial(n + k, k) - (n + 1) as f64 * gain.ln();
            if k > 0 {
                lw += k as f64 * z.ln();
            }
            C64::new((0.5 * lw).exp(), 0.0)
        })
        .collect()
}

/// Pure loss `{A_l}`; `l_max` is the smallest depth reaching a completeness
/// deficit of 1e−14 on the guarded levels.
pub fn loss_channel(mu: f64, space: FockSpace) -> Result<KrausChannel> {
    CvNoiseParams::loss(mu)?;
    let dim = space.dim();
    let g = space.guarded_max() + 1;
    let mut ops = Vec::new();
    let mut cum = vec![0.0; g];
    for l in 0..dim {
        let w = loss_weights(mu, l, dim);
        for (c, wn) in cum.iter_mut().zip(&w) {
            *c += wn.norm_sqr();
        }
        ops.push(KrausOp {
            label: KrausLabel::single(Jump::Loss(l)),
            op: FactorOp::Monomial(Monomial {
                offset: -(l as isize),
                weights: w,
            }),
        });
        if mu == 0.0 || cum.iter().all(|c| (1.0 - c).abs() <= LOSS_TAIL_TOL) {
            break;
        }
    }
    KrausChannel::new(fock_target(space), ops)
}

/// Quantum-limited amplifier `{B_k}`. Terms are added until their largest
/// guarded weight drops below 1e−17; the residual deficit comes from
/// amplification past the top level and is reported, not renormalized.
pub fn amp_channel(gain: f64, space: FockSpace) -> Result<KrausChannel> {
    CvNoiseParams::new(0.0, gain)?;
    let dim = space.dim();
    let g = space.guarded_max() + 1;
    let mut ops = Vec::new();
    let mut prev = f64::INFINITY;
    for k in 0..dim {
        let w = gain_weights(gain, k, dim);
        let peak = w[..g].iter().map(|x| x.norm_sqr()).fold(0.0, f64::max);
        if k > 0 && peak < GAIN_TERM_TOL && peak <= prev {
            break;
        }
        prev = peak;
        ops.push(KrausOp {
            label: KrausLabel::single(Jump::Gain(k)),
            op: FactorOp::Monomial(Monomial {
                offset: k as isize,
                weights: w,
            }),
        });
        if gain == 1.0 {
            break;
        }
    }
    KrausChannel::new(fock_target(space), ops)
}

/// `amp(G) ∘ loss(μ)`, or a single factor when the other is trivial.
pub fn cv_channel(params: CvNoiseParams, space: FockSpace) -> Result<KrausChannel> {
    match (params.mu == 0.0, params.gain == 1.0) {
        (_, true) => loss_channel(params.mu, space),
        (true, false) => amp_channel(params.gain, space),
        (false, false) => compose(&amp_channel(params.gain, space)?, &loss_channel(params.mu, space)?),
    }
}

pub fn thermal_channel(eta: f64, nbar: f64, space: FockSpace) -> Result<KrausChannel> {
    let p = CvNoiseParams::thermal(eta, nbar)?;
    compose(&amp_channel(p.gain, space)?, &loss_channel(p.mu, space)?)
}

pub fn gdn_channel(eta: f64, space: FockSpace) -> Result<KrausChannel> {
    let p = CvNoiseParams::gdn(eta)?;
    compose(&amp_channel(p.gain, space)?, &loss_channel(p.mu, space)?)
}
