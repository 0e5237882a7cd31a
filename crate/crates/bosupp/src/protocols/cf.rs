//! Controlled-Fourier suppression: the full joint simulation and the
//! closed-form filter it reduces to for noiseless ancillas.

use super::engine::{basis, projector, HeraldedResult, Joint};
use super::spec::{AncillaInit, FirstGate, GateNoise, ProtocolSpec, Variant};
use crate::channels::{
    check_leakage, loss_channel, qubit_damping, CvNoiseParams, DampingKind, Jump,
    KrausChannel,
};
use crate::codes::{parity_class, BosonicCode, ParityKind};
use crate::error::{Error, Result};
use crate::fock::apply::{sandwich_add, FactorOp, Monomial};
use crate::fock::linalg::ln_factorial;
use crate::fock::{CMatrix, CVector, CompositeSpace, FockSpace, Operator, State, C64};

fn pauli_dot(axis: [f64; 3]) -> CMatrix {
    let [x, y, z] = axis;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(z, 0.0),
            C64::new(x, -y),
            C64::new(x, y),
            C64::new(-z, 0.0),
        ],
    )
}

fn check_axis(axis: [f64; 3]) -> Result<()> {
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(format!("rotation axis has norm {norm}")));
    }
    Ok(())
}

/// `n̂·σ|0⟩`.
pub fn flipped_ground(axis: [f64; 3]) -> CVector {
    CVector::from_vec(vec![C64::new(axis[2], 0.0), C64::new(axis[0], axis[1])])
}

/// Blocks `u_n = e^{iθn n̂·σ}` for `n = 0..dim`, built from the two
/// eigenprojectors of `n̂·σ`.
pub fn rotation_blocks(theta: f64, axis: [f64; 3], dim: usize) -> Result<Vec<CMatrix>> {
    check_axis(axis)?;
    let s = pauli_dot(axis);
    let id = CMatrix::identity(2, 2);
    let half = C64::new(0.5, 0.0);
    let plus = (&id + &s) * half;
    let minus = (&id - &s) * half;
    Ok((0..dim)
        .map(|n| {
            let phi = theta * n as f64;
            &plus * C64::from_polar(1.0, phi) + &minus * C64::from_polar(1.0, -phi)
        })
        .collect())
}

/// `e^{iθ a†a n̂·σ}` on Fock ⊗ qubit.
pub fn conditional_rotation(theta: f64, axis: [f64; 3], space: FockSpace) -> Result<Operator> {
    let d = space.dim();
    let blocks = rotation_blocks(theta, axis, d)?;
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for (n, b) in blocks.iter().enumerate() {
        m.view_mut((2 * n, 2 * n), (2, 2)).copy_from(b);
    }
    Operator::new(CompositeSpace::fock(space).with_ancilla(2)?, m)
}

fn fock_dim(input: &State) -> Result<usize> {
    input
        .space()
        .fock_space()
        .map(|f| f.dim())
        .ok_or_else(|| Error::Dimension("protocol input needs a Fock factor".into()))
}

fn gate_noise_channels(g: &GateNoise, space: FockSpace) -> Result<(KrausChannel, KrausChannel)> {
    Ok((
        loss_channel(g.loss, space)?,
        qubit_damping(g.damping, DampingKind::Composite)?,
    ))
}

/// Unnormalized heralded output and the largest leakage seen.
pub(crate) fn cf_unnormalized(
    input: &State,
    cv: &KrausChannel,
    dv: &KrausChannel,
    spec: &ProtocolSpec,
) -> Result<(State, f64)> {
    if !matches!(spec.variant, Variant::Cf | Variant::Pqp) {
        return Err(Error::Parameter(format!("'{spec}' is not a controlled-Fourier protocol")));
    }
    spec.validate()?;
    let k = spec.thetas.len();
    if k == 0 {
        return Err(Error::Parameter("controlled-Fourier needs at least one ancilla".into()));
    }
    if dv.dim() != 2 {
        return Err(Error::Dimension(format!("ancilla noise acts on dimension {}", dv.dim())));
    }
    let d = fock_dim(input)?;
    let mut init = vec![basis(2, 0); k];
    if spec.ancilla_init == AncillaInit::AxisFlipped {
        init[0] = flipped_ground(spec.axis);
    }
    let mut anc = CMatrix::identity(1, 1);
    for v in &init {
        anc = anc.kronecker(&projector(v));
    }
    let mut joint = Joint::new(input, &vec![2; k], &anc)?;
    let first = joint.kept;
    let fock = input.space().fock_space().expect("checked above");
    let noisy = match &spec.gate_noise {
        Some(g) => Some(gate_noise_channels(g, fock)?),
        None => None,
    };
    let after_gate = |joint: &mut Joint, j: usize| -> Result<()> {
        if let Some((loss, damp)) = &noisy {
            joint.channel(loss, 0)?;
            joint.channel(damp, first + j)?;
        }
        Ok(())
    };

    for (j, &theta) in spec.thetas.iter().enumerate() {
        if j == 0 && spec.first_gate == FirstGate::LocalRotation {
            let phases: Vec<C64> = (0..d).map(|n| C64::from_polar(1.0, theta * n as f64)).collect();
            joint.local(0, &CMatrix::from_diagonal(&CVector::from_vec(phases)))?;
        } else {
            joint.controlled(first + j, &rotation_blocks(theta, spec.axis, d)?)?;
        }
        after_gate(&mut joint, j)?;
    }
    joint.channel(cv, 0)?;
    if !dv.is_identity() {
        for j in 0..k {
            joint.channel(dv, first + j)?;
        }
    }
    for (j, &theta) in spec.thetas.iter().enumerate().rev() {
        joint.controlled(first + j, &rotation_blocks(-theta, spec.axis, d)?)?;
        after_gate(&mut joint, j)?;
    }
    let mut herald = CVector::from_element(1, C64::new(1.0, 0.0));
    for v in &init {
        herald = herald.kronecker(v);
    }
    let out = joint.herald(&[herald])?;
    Ok((out, joint.leakage))
}

/// Full joint simulation of the `K`-ancilla interferometer: conditional
/// rotations, CV noise on the mode and DV noise on every ancilla, inverse
/// rotations, and a projection of every ancilla back onto its initial state.
///
/// The input may carry extra passive factors after the Fock mode; they are
/// kept in the output.
pub fn suppress_cf(
    input: &State,
    cv: &KrausChannel,
    dv: &KrausChannel,
    spec: &ProtocolSpec,
) -> Result<HeraldedResult> {
    let (out, leak) = cf_unnormalized(input, cv, dv, spec)?;
    HeraldedResult::new(out, leak)
}

/// Input `ρ_BX` on Fock ⊗ X, protected by a single-ancilla CF interferometer
/// acting on the Fock mode only.
pub fn protect_hybrid(input: &State, cv: &KrausChannel, spec: &ProtocolSpec) -> Result<HeraldedResult> {
    if input.space().n_factors() < 2 {
        return Err(Error::Dimension("hybrid input needs a passive factor".into()));
    }
    let dv = KrausChannel::identity(CompositeSpace::qudits(&[2])?)?;
    suppress_cf(input, cv, &dv, spec)
}

/// `Π_j cos²(θ_j (l−k))`: the weight the noiseless interferometer gives a
/// Kraus term with net photon change `l−k`.
pub fn filter_weight(net_loss: isize, thetas: &[f64]) -> f64 {
    thetas
        .iter()
        .map(|t| (t * net_loss as f64).cos().powi(2))
        .product()
}

/// Whether `(l−k) ≡ 0 mod 2^K`.
pub fn passes_filter(net_loss: isize, k: usize) -> bool {
    net_loss.rem_euclid(1isize << k) == 0
}

/// `L_{l,k} = c_{l,k} x^{a†a/2} a†^k a^l` as a monomial.
fn filtered_kraus(params: CvNoiseParams, l: usize, k: usize, dim: usize) -> Monomial {
    let (mu, g) = (params.mu(), params.gain());
    let ln_x = params.x().ln();
    let mut ln_c = -0.5 * (ln_factorial(k) + ln_factorial(l) + g.ln());
    if k > 0 {
        ln_c += 0.5 * k as f64 * ((g - 1.0) / (1.0 - mu)).ln();
    }
    if l > 0 {
        ln_c += 0.5 * l as f64 * mu.ln();
    }
    let weights = (0..dim)
        .map(|n| {
            if n < l || n - l + k >= dim {
                return C64::new(0.0, 0.0);
            }
            let m = n - l + k;
            // a^l then a†^k: n!/(n−l)! · m!/(n−l)!
            let ln_amp = 0.5 * (ln_factorial(n) + ln_factorial(m)) - ln_factorial(n - l);
            C64::new((ln_c + ln_amp + 0.5 * m as f64 * ln_x).exp(), 0.0)
        })
        .collect();
    Monomial {
        offset: k as isize - l as isize,
        weights,
    }
}

fn jump_ranges(cv: &KrausChannel) -> (usize, usize) {
    let mut lmax = 0;
    let mut kmax = 0;
    for op in cv.kraus() {
        for j in &op.label.0 {
            match *j {
                Jump::Loss(l) => lmax = lmax.max(l),
                Jump::Gain(k) => kmax = kmax.max(k),
                Jump::Dv(_) => {}
            }
        }
    }
    (lmax, kmax)
}

fn analytic_sum(
    input: &State,
    params: CvNoiseParams,
    weight: impl Fn(isize) -> f64,
) -> Result<(State, f64)> {
    let space = input.space().clone();
    let fock = space
        .fock_space()
        .ok_or_else(|| Error::Dimension("protocol input needs a Fock factor".into()))?;
    let d = fock.dim();
    // Same jump cutoffs as the channel factories use.
    let (lmax, kmax) = jump_ranges(&crate::channels::cv_channel(params, fock)?);
    let dims = space.factor_dims();
    let n = space.dim();
    let mut all = CMatrix::zeros(n, n);
    let mut kept = CMatrix::zeros(n, n);
    let mut scratch = CMatrix::zeros(n, n);
    for l in 0..=lmax {
        for k in 0..=kmax {
            let op = FactorOp::Monomial(filtered_kraus(params, l, k, d));
            scratch.fill(C64::new(0.0, 0.0));
            sandwich_add(input.matrix(), &dims, 0, &op, &mut scratch)?;
            all += &scratch;
            let w = weight(l as isize - k as isize);
            if w > 0.0 {
                kept += &scratch * C64::new(w, 0.0);
            }
        }
    }
    let total = State::from_matrix(space.clone(), all)?;
    let leak = check_leakage(input.weight(), &total, "filtered channel")?;
    Ok((State::from_matrix(space, kept)?, leak))
}

/// `Σ_{(l−k) ≡ 0 mod 2^K} L_{l,k} ρ L_{l,k}†`, the heralded output of the
/// `K`-ancilla interferometer with `θ_j = π/2^j` and noiseless ancillas.
pub fn suppress_analytic(input: &State, params: CvNoiseParams, k: usize) -> Result<HeraldedResult> {
    if k == 0 {
        return Err(Error::Parameter("K must be at least 1".into()));
    }
    let (out, leak) = analytic_sum(input, params, |d| if passes_filter(d, k) { 1.0 } else { 0.0 })?;
    HeraldedResult::new(out, leak)
}

/// As [`suppress_analytic`] for arbitrary angles, weighting each term by
/// [`filter_weight`].
pub fn suppress_analytic_thetas(
    input: &State,
    params: CvNoiseParams,
    thetas: &[f64],
) -> Result<HeraldedResult> {
    let (out, leak) = analytic_sum(input, params, |d| filter_weight(d, thetas))?;
    HeraldedResult::new(out, leak)
}

/// Replaces the first conditional rotation by a local mode rotation for
/// like-even codes, or starts the first ancilla in `n̂·σ|0⟩` for like-odd
/// codes.
pub fn parity_shortcut(code: &BosonicCode, spec: &ProtocolSpec) -> Result<ProtocolSpec> {
    let mut out = spec.clone();
    match parity_class(code).class {
        ParityKind::LikeEven => out.first_gate = FirstGate::LocalRotation,
        ParityKind::LikeOdd => out.ancilla_init = AncillaInit::AxisFlipped,
        other => {
            return Err(Error::Parameter(format!(
                "{} has parity {other:?}; the shortcut needs like parity",
                code.name()
            )))
        }
    }
    out.shortcut = false;
    Ok(out)
}
