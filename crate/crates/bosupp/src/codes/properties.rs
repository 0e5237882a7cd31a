use super::BosonicCode;
use crate::error::{Error, Result};
use crate::fock::{ladder, CMatrix, CompositeSpace, Operator, State, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `C_L = (|0_L⟩⟨0_L| + |1_L⟩⟨1_L|)/2`.
pub fn codespace_identity(code: &BosonicCode) -> Operator {
    let z = code.zero();
    let o = code.one();
    let m = (z * z.adjoint() + o * o.adjoint()) * C64::new(0.5, 0.0);
    Operator::new(code.space(), m).expect("codewords live in the code space")
}

/// Photon-number moments of the codespace identity.
///
/// `g(Y) = tr{C_L Y C_L Y†} + |tr{C_L Y}|²`. The last three fields are the
/// extra moments needed by the unsuppressed fidelity.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    pub n_mean: f64,
    pub n2: f64,
    /// `tr{C_L (a†a)³}`, which sets the size of the neglected third-order terms.
    pub n3: f64,
    pub a2: C64,
    pub g_n: f64,
    pub g_a2: f64,
    /// `tr{C_L a† C_L a}`
    pub cad_ca: f64,
    /// `tr{C_L a C_L a†}`
    pub ca_cad: f64,
    /// `|tr{C_L a}|²`
    pub abs_a_sq: f64,
}

fn tr(m: &CMatrix) -> C64 {
    m.trace()
}

fn g(c: &CMatrix, y: &CMatrix) -> f64 {
    (tr(&(c * y * c * y.adjoint())) + C64::new(tr(&(c * y)).norm_sqr(), 0.0)).re
}

pub fn moments(code: &BosonicCode) -> MomentSet {
    let c = codespace_identity(code).into_matrix();
    let (a, ad) = ladder(code.space());
    let (a, ad) = (a.into_matrix(), ad.into_matrix());
    let n = &ad * &a;
    let a2 = &a * &a;
    MomentSet {
        n_mean: tr(&(&c * &n)).re,
        n2: tr(&(&c * &n * &n)).re,
        n3: tr(&(&c * &n * &n * &n)).re,
        a2: tr(&(&c * &a2)),
        g_n: g(&c, &n),
        g_a2: g(&c, &a2),
        cad_ca: tr(&(&c * &ad * &c * &a)).re,
        ca_cad: tr(&(&c * &a * &c * &ad)).re,
        abs_a_sq: tr(&(&c * &a)).norm_sqr(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityKind {
    LikeEven,
    LikeOdd,
    Opposite,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParityClass {
    pub class: ParityKind,
    /// Largest `N` such that `e^{i2πa†a/N}` acts as a global phase on the
    /// code space, i.e. every supported level of both codewords shares one
    /// residue mod `N`. Zero when no such `N ≥ 2` exists.
    pub rotation_order: usize,
}

const SUPPORT_THRESHOLD: f64 = 1e-10;

fn support(v: &crate::fock::CVector) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > SUPPORT_THRESHOLD)
        .map(|(n, _)| n)
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn parity_class(code: &BosonicCode) -> ParityClass {
    let s0 = support(code.zero());
    let s1 = support(code.one());
    let parity = |s: &[usize]| -> Option<usize> {
        let p = s.first()? % 2;
        s.iter().all(|n| n % 2 == p).then_some(p)
    };
    let class = match (parity(&s0), parity(&s1)) {
        (Some(0), Some(0)) => ParityKind::LikeEven,
        (Some(1), Some(1)) => ParityKind::LikeOdd,
        (Some(_), Some(_)) => ParityKind::Opposite,
        _ => ParityKind::None,
    };
    let all: Vec<usize> = s0.iter().chain(s1.iter()).copied().collect();
    let base = all.iter().copied().min().unwrap_or(0);
    let order = all.iter().fold(0, |acc, &n| gcd(acc, n - base));
    ParityClass {
        class,
        rotation_order: if order >= 2 { order } else { 0 },
    }
}

/// Pure encoded state `c0|0_L⟩ + c1|1_L⟩`.
pub fn logical_state(code: &BosonicCode, c0: f64, c1: C64) -> Result<State> {
    let norm = c0 * c0 + c1.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(format!(
            "logical coefficients have norm² {norm}"
        )));
    }
    let ket = code.encode(C64::new(c0, 0.0), c1);
    State::pure(CompositeSpace::fock(code.space()), &ket)
}

/// Uniform point on the Bloch sphere as `(c0, c1)` with `c0 ≥ 0` real.
pub fn haar_coefficients<R: Rng>(rng: &mut R) -> (f64, C64) {
    let u: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let c0 = ((1.0 + u) / 2.0).max(0.0).sqrt();
    let c1 = C64::from_polar(((1.0 - u) / 2.0).max(0.0).sqrt(), phi);
    (c0, c1)
}

/// Haar-random logical state from a seeded ChaCha generator.
pub fn haar_sample(code: &BosonicCode, seed: u64) -> Result<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (c0, c1) = haar_coefficients(&mut rng);
    logical_state(code, c0, c1)
}
