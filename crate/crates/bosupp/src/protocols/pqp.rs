//! `[PQP-condrot]^L` benchmark: conditional displacements in position,
//! momentum and position followed by a conditional rotation, stacked on top
//! of the CF gate, plus a simplex optimizer for the layer parameters.

use std::f64::consts::{FRAC_PI_2, PI};

use argmin::core::{CostFunction, Executor, State as _, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cf::{cf_unnormalized, rotation_blocks};
use super::engine::{basis, projector, HeraldedResult, Joint};
use super::logical::LogicalProcess;
use super::spec::ProtocolSpec;
use crate::channels::KrausChannel;
use crate::codes::BosonicCode;
use crate::error::{Error, Result};
use crate::fock::{displacement, CMatrix, FockSpace, State, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PqpLayer {
    pub beta_p1: f64,
    /// Magnitude of the imaginary (momentum) displacement.
    pub beta_q: f64,
    pub beta_p2: f64,
    pub theta: f64,
}

impl PqpLayer {
    pub const ZERO: PqpLayer = PqpLayer {
        beta_p1: 0.0,
        beta_q: 0.0,
        beta_p2: 0.0,
        theta: 0.0,
    };
}

#[derive(Clone, Debug, PartialEq)]
pub struct PqpParams {
    pub layers: Vec<PqpLayer>,
    pub axis: [f64; 3],
}

/// Box for the optimizer: `|β| ≤ BETA_MAX`, `θ ∈ [0, π]`.
pub const BETA_MAX: f64 = 2.0;
pub const RESTARTS: usize = 5;

impl PqpParams {
    /// All-zero layers, which reduce the unitary to the bare CF gate.
    pub fn zero(layers: usize) -> Self {
        Self {
            layers: vec![PqpLayer::ZERO; layers],
            axis: super::spec::X_AXIS,
        }
    }

    fn from_slice(x: &[f64], axis: [f64; 3]) -> Self {
        Self {
            layers: x
                .chunks(4)
                .map(|c| PqpLayer {
                    beta_p1: c[0],
                    beta_q: c[1],
                    beta_p2: c[2],
                    theta: c[3],
                })
                .collect(),
            axis,
        }
    }
}

fn kron2(op: &CMatrix, anc: &CMatrix) -> CMatrix {
    op.kronecker(anc)
}

fn sigma(axis: [f64; 3]) -> CMatrix {
    let [x, y, z] = axis;
    CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(z, 0.0), C64::new(x, -y), C64::new(x, y), C64::new(-z, 0.0)],
    )
}

/// `exp(n̂·σ ⊗ (βa† − β*a))` on Fock ⊗ qubit.
pub fn conditional_displacement(beta: C64, axis: [f64; 3], space: FockSpace) -> Result<CMatrix> {
    let dp = displacement(space, beta)?.into_matrix();
    let dm = displacement(space, -beta)?.into_matrix();
    let half = C64::new(0.5, 0.0);
    let even = (&dp + &dm) * half;
    let odd = (&dp - &dm) * half;
    Ok(kron2(&even, &CMatrix::identity(2, 2)) + kron2(&odd, &sigma(axis)))
}

fn rotation_matrix(theta: f64, axis: [f64; 3], space: FockSpace) -> Result<CMatrix> {
    let d = space.dim();
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for (n, b) in rotation_blocks(theta, axis, d)?.iter().enumerate() {
        m.view_mut((2 * n, 2 * n), (2, 2)).copy_from(b);
    }
    Ok(m)
}

/// `U_s = Λ_L ⋯ Λ_1 U_CF` with `Λ = CR(θ) CD(β_P2) CD(iβ_Q) CD(β_P1)`.
pub fn pqp_unitary(params: &PqpParams, space: FockSpace) -> Result<CMatrix> {
    let axis = params.axis;
    let mut u = rotation_matrix(FRAC_PI_2, axis, space)?;
    for l in &params.layers {
        let cd1 = conditional_displacement(C64::new(l.beta_p1, 0.0), axis, space)?;
        let cdq = conditional_displacement(C64::new(0.0, l.beta_q), axis, space)?;
        let cd2 = conditional_displacement(C64::new(l.beta_p2, 0.0), axis, space)?;
        let cr = rotation_matrix(l.theta, axis, space)?;
        u = cr * cd2 * cdq * cd1 * u;
    }
    Ok(u)
}

pub(crate) fn pqp_unnormalized(
    input: &State,
    cv: &KrausChannel,
    dv: &KrausChannel,
    params: &PqpParams,
) -> Result<(State, f64)> {
    if params.layers.is_empty() {
        let mut spec = ProtocolSpec::cf(1);
        spec.axis = params.axis;
        return cf_unnormalized(input, cv, dv, &spec);
    }
    let fock = input
        .space()
        .fock_space()
        .filter(|_| input.space().n_factors() == 1)
        .ok_or_else(|| Error::Dimension("PQP input must be a single mode".into()))?;
    let u = pqp_unitary(params, fock)?;
    let ground = projector(&basis(2, 0));
    let mut joint = Joint::new(input, &[2], &ground)?;
    joint.full(&u)?;
    joint.channel(cv, 0)?;
    if !dv.is_identity() {
        joint.channel(dv, 1)?;
    }
    joint.full(&u.adjoint())?;
    Ok((joint.herald(&[basis(2, 0)])?, joint.leakage))
}

/// Runs the layered interferometer; zero layers is exactly the CF protocol.
pub fn pqp_condrot(
    input: &State,
    cv: &KrausChannel,
    dv: &KrausChannel,
    params: &PqpParams,
) -> Result<HeraldedResult> {
    let (out, leak) = pqp_unnormalized(input, cv, dv, params)?;
    HeraldedResult::new(out, leak)
}

/// Haar-averaged normalized fidelity of the layered protocol on `code`.
pub fn pqp_mean_fidelity(
    code: &BosonicCode,
    cv: &KrausChannel,
    dv: &KrausChannel,
    params: &PqpParams,
) -> Result<f64> {
    LogicalProcess::build(code, |s| pqp_unnormalized(s, cv, dv, params))?.mean_fidelity()
}

#[derive(Clone, Debug)]
pub struct PqpOptimum {
    pub params: PqpParams,
    pub mean_fidelity: f64,
    /// Whether any restart met the simplex tolerance.
    pub converged: bool,
    pub evaluations: u64,
}

struct Objective<'a> {
    code: &'a BosonicCode,
    cv: &'a KrausChannel,
    dv: &'a KrausChannel,
    axis: [f64; 3],
}

const PENALTY: f64 = 10.0;

fn clamp(x: &[f64]) -> (Vec<f64>, f64) {
    let mut dist = 0.0;
    let y = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (lo, hi) = if i % 4 == 3 { (0.0, PI) } else { (-BETA_MAX, BETA_MAX) };
            let c = v.clamp(lo, hi);
            dist += (v - c).abs();
            c
        })
        .collect();
    (y, dist)
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let (y, dist) = clamp(x);
        let params = PqpParams::from_slice(&y, self.axis);
        // Parameters that push the state into the guard band score as bad
        // points instead of aborting the search.
        Ok(match pqp_mean_fidelity(self.code, self.cv, self.dv, &params) {
            Ok(f) => -f + dist,
            Err(Error::Leakage { .. }) | Err(Error::Starvation(_)) => PENALTY + dist,
            Err(e) => return Err(argmin::core::Error::msg(e.to_string())),
        })
    }
}

/// Maximizes the Haar-averaged fidelity over the layer parameters with
/// Nelder-Mead simplex searches. The first restart starts from the CF point,
/// so the result never scores below the bare CF gate.
pub fn optimize_pqp(
    code: &BosonicCode,
    cv: &KrausChannel,
    dv: &KrausChannel,
    layers: usize,
    seed: u64,
) -> Result<PqpOptimum> {
    let axis = super::spec::X_AXIS;
    let start = PqpParams::zero(layers);
    let f0 = pqp_mean_fidelity(code, cv, dv, &start)?;
    let mut best = PqpOptimum {
        params: start,
        mean_fidelity: f0,
        converged: layers == 0,
        evaluations: 1,
    };
    if layers == 0 {
        return Ok(best);
    }
    let n = 4 * layers;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for restart in 0..RESTARTS {
        let x0: Vec<f64> = if restart == 0 {
            vec![0.0; n]
        } else {
            (0..n)
                .map(|i| {
                    if i % 4 == 3 {
                        rng.random_range(0.0..PI)
                    } else {
                        rng.random_range(-1.0..1.0)
                    }
                })
                .collect()
        };
        let mut simplex = vec![x0.clone()];
        for i in 0..n {
            let mut x = x0.clone();
            x[i] += if x[i] > 0.5 { -0.25 } else { 0.25 };
            simplex.push(x);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-10)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        let obj = Objective { code, cv, dv, axis };
        let res = Executor::new(obj, solver)
            .configure(|s| s.max_iters(150 * n as u64).counting(true))
            .run()
            .map_err(|e| Error::Numerical(format!("simplex search failed: {e}")))?;
        let state = res.state();
        best.evaluations += state.get_func_counts().values().sum::<u64>();
        if matches!(
            state.get_termination_status(),
            TerminationStatus::Terminated(TerminationReason::SolverConverged)
        ) {
            best.converged = true;
        }
        if let Some(x) = state.get_best_param() {
            let (y, _) = clamp(x);
            let params = PqpParams::from_slice(&y, axis);
            if let Ok(f) = pqp_mean_fidelity(code, cv, dv, &params) {
                if f > best.mean_fidelity {
                    best.mean_fidelity = f;
                    best.params = params;
                }
            }
        }
    }
    Ok(best)
}
