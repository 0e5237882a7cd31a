//! The heralded protocol restricted to a code space, as a linear map on
//! logical density matrices, and its Bloch-sphere averages.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analytics::bloch_average;
use crate::codes::{haar_coefficients, logical_state, BosonicCode};
use crate::error::{Error, Result};
use crate::fock::{CMatrix, State, C64};

/// `M[a][b][i][j] = ⟨a_L|E(|i⟩⟨j|)|b_L⟩` and `t[i][j] = tr E(|i⟩⟨j|)`,
/// where `E` is the unnormalized heralded map.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalProcess {
    pub m: [[[[C64; 2]; 2]; 2]; 2],
    pub t: [[C64; 2]; 2],
    pub leakage: f64,
}

/// Quadrature tolerance used for normalized averages.
pub const AVERAGE_TOL: f64 = 1e-12;

impl LogicalProcess {
    /// Probes `run` with `|0⟩`, `|1⟩`, `|+⟩` and `|+i⟩` and recovers the
    /// off-diagonal images by linearity.
    pub fn build(
        code: &BosonicCode,
        run: impl Fn(&State) -> Result<(State, f64)>,
    ) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let probes = [
            (1.0, C64::new(0.0, 0.0)),
            (0.0, C64::new(1.0, 0.0)),
            (s, C64::new(s, 0.0)),
            (s, C64::new(0.0, s)),
        ];
        let mut outs = Vec::with_capacity(4);
        let mut leakage = 0.0f64;
        for (c0, c1) in probes {
            let (out, leak) = run(&logical_state(code, c0, c1)?)?;
            if out.dim() != code.space().dim() {
                return Err(Error::Dimension("protocol output is not a single mode".into()));
            }
            leakage = leakage.max(leak);
            outs.push(out.matrix().clone());
        }
        let half = C64::new(0.5, 0.0);
        let diag = (&outs[0] + &outs[1]) * half;
        let a = &outs[2] - &diag;
        let b = &outs[3] - &diag;
        let e01 = &a + &b * C64::new(0.0, 1.0);
        let e10 = e01.adjoint();
        let e = [[outs[0].clone(), e01], [e10, outs[1].clone()]];
        Ok(Self::from_images(code, &e, leakage))
    }

    /// From the images `e[i][j] = E(|i_L⟩⟨j_L|)`.
    pub fn from_images(code: &BosonicCode, e: &[[CMatrix; 2]; 2], leakage: f64) -> Self {
        let zero = C64::new(0.0, 0.0);
        let mut m = [[[[zero; 2]; 2]; 2]; 2];
        let mut t = [[zero; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                t[i][j] = e[i][j].trace();
                for a in 0..2 {
                    for b in 0..2 {
                        let bra = code.codeword(a).adjoint();
                        m[a][b][i][j] = (bra * &e[i][j] * code.codeword(b))[(0, 0)];
                    }
                }
            }
        }
        Self { m, t, leakage }
    }

    /// `⟨ψ|E(ψ)|ψ⟩` for `ψ = c0|0_L⟩ + c1|1_L⟩`.
    pub fn numerator(&self, c0: C64, c1: C64) -> f64 {
        let c = [c0, c1];
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        acc += c[a].conj() * c[b] * c[i] * c[j].conj() * self.m[a][b][i][j];
                    }
                }
            }
        }
        acc.re
    }

    /// Success probability `tr E(ψ)`.
    pub fn denominator(&self, c0: C64, c1: C64) -> f64 {
        let c = [c0, c1];
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += c[i] * c[j].conj() * self.t[i][j];
            }
        }
        acc.re
    }

    /// Normalized fidelity for one logical state.
    pub fn fidelity(&self, c0: C64, c1: C64) -> Result<f64> {
        let d = self.denominator(c0, c1);
        if !(d >= super::STARVATION_TOL) {
            return Err(Error::Starvation(d));
        }
        Ok(self.numerator(c0, c1) / d)
    }

    /// Haar average of the success probability.
    pub fn mean_p_succ(&self) -> f64 {
        ((self.t[0][0] + self.t[1][1]) * 0.5).re
    }

    /// Haar average of the unnormalized fidelity `⟨ψ|E(ψ)|ψ⟩`.
    pub fn mean_numerator(&self) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                acc += self.m[a][b][a][b] + self.m[a][a][b][b];
            }
        }
        acc.re / 6.0
    }

    /// Haar average of the normalized fidelity, by Bloch-sphere quadrature.
    pub fn mean_fidelity(&self) -> Result<f64> {
        if self.t.iter().flatten().all(|x| x.norm() < super::STARVATION_TOL) {
            return Err(Error::Starvation(0.0));
        }
        bloch_average(
            |c0, c1| {
                let (c0, c1) = (C64::new(c0, 0.0), c1);
                let d = self.denominator(c0, c1);
                if d > 0.0 {
                    self.numerator(c0, c1) / d
                } else {
                    0.0
                }
            },
            AVERAGE_TOL,
        )
    }

    /// Mean normalized fidelity over the six Pauli eigenstates.
    pub fn pauli_fidelity(&self) -> Result<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let states = [
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
            (C64::new(s, 0.0), C64::new(s, 0.0)),
            (C64::new(s, 0.0), C64::new(-s, 0.0)),
            (C64::new(s, 0.0), C64::new(0.0, s)),
            (C64::new(s, 0.0), C64::new(0.0, -s)),
        ];
        let mut acc = 0.0;
        for (c0, c1) in states {
            acc += self.fidelity(c0, c1)?;
        }
        Ok(acc / 6.0)
    }

    /// Monte Carlo mean and standard error of the normalized fidelity.
    pub fn monte_carlo_fidelity(&self, samples: usize, seed: u64) -> Result<(f64, f64)> {
        if samples < 2 {
            return Err(Error::Parameter("Monte Carlo needs at least two samples".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..samples {
            let (c0, c1) = haar_coefficients(&mut rng);
            let f = self.fidelity(C64::new(c0, 0.0), c1)?;
            sum += f;
            sq += f * f;
        }
        let n = samples as f64;
        let mean = sum / n;
        let var = (sq / n - mean * mean).max(0.0) * n / (n - 1.0);
        Ok((mean, (var / n).sqrt()))
    }
}
