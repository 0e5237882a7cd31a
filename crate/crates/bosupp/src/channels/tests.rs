use super::*;
use crate::fock::{coherent_ket, fock_ket, ket_fidelity, max_abs, number_function, partial_trace, CVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space() -> FockSpace {
    FockSpace::default()
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn mean_photons(rho: &State) -> f64 {
    let n = number_function(rho.space().fock_space().unwrap(), |k| k as f64).unwrap();
    rho.expect(&n).unwrap().re
}

fn random_density(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = CMatrix::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let rho = &a * a.adjoint();
    let t = rho.trace();
    rho / t
}

#[test]
fn loss_identity_and_single_photon() {
    let ch = loss_channel(0.0, space()).unwrap();
    assert_eq!(ch.len(), 1);
    assert_eq!(ch.deficit(), 0.0);

    let mu = 0.3;
    let ch = loss_channel(mu, space()).unwrap();
    assert!(ch.deficit() <= 1e-10);
    let rho = State::pure(space(), &fock_ket(space(), 1).unwrap()).unwrap();
    let out = ch.apply(&rho).unwrap();
    let m = out.matrix();
    assert!((m[(1, 1)].re - (1.0 - mu)).abs() < 1e-14);
    assert!((m[(0, 0)].re - mu).abs() < 1e-14);
    assert!((out.weight() - 1.0).abs() < 1e-14);
    assert!(loss_channel(1.0, space()).is_err());
}

#[test]
fn loss_keeps_coherent_states_pure() {
    let mu = 0.2;
    let beta = C64::new(1.2, -0.7);
    let rho = State::pure(space(), &coherent_ket(space(), beta)).unwrap();
    let out = loss_channel(mu, space()).unwrap().apply(&rho).unwrap();
    let target = coherent_ket(space(), beta * (1.0 - mu).sqrt());
    assert!((1.0 - ket_fidelity(&target, out.matrix())).abs() < 1e-10);
}

#[test]
fn vacuum_mean_photons() {
    let vac = State::pure(space(), &fock_ket(space(), 0).unwrap()).unwrap();

    let g = 1.3;
    let out = amp_channel(g, space()).unwrap().apply(&vac).unwrap();
    assert!((mean_photons(&out) - (g - 1.0)).abs() < 1e-10);
    assert_eq!(amp_channel(1.0, space()).unwrap().len(), 1);

    let (eta, nbar) = (0.05, 0.5);
    let out = thermal_channel(eta, nbar, space()).unwrap().apply(&vac).unwrap();
    assert!((mean_photons(&out) - eta * nbar).abs() < 1e-10);

    let eta = 0.2;
    let out = gdn_channel(eta, space()).unwrap().apply(&vac).unwrap();
    assert!((mean_photons(&out) - eta / (1.0 - eta)).abs() < 1e-10);
}

#[test]
fn thermal_parameterization() {
    let p = CvNoiseParams::thermal(0.05, 0.5).unwrap();
    assert!((p.gain() - 1.025).abs() < 1e-15);
    assert!((p.mu() - 0.075 / 1.025).abs() < 1e-15);
    assert!((p.mu() * p.gain() - 0.075).abs() < 1e-15);
    let p = CvNoiseParams::thermal(0.05, 0.0).unwrap();
    assert_eq!(p.gain(), 1.0);
    assert!((p.mu() - 0.05).abs() < 1e-15);
    let p = CvNoiseParams::gdn(0.2).unwrap();
    assert!((p.gain() - 1.25).abs() < 1e-15 && p.mu() == 0.2);
    let p = CvNoiseParams::new(0.1, 1.2).unwrap();
    assert!((p.x() - 0.75).abs() < 1e-15);
    assert!((p.y() - 0.12 / 0.9).abs() < 1e-15);
    assert!((p.z() - (1.0 - 1.0 / 1.2)).abs() < 1e-15);
    assert!(CvNoiseParams::new(0.6, 2.0).is_err());
}

#[test]
fn composition_matches_sequential_application() {
    let (eta, nbar) = (0.1, 0.8);
    let p = CvNoiseParams::thermal(eta, nbar).unwrap();
    let rho = State::pure(space(), &coherent_ket(space(), C64::new(1.0, 0.5))).unwrap();
    let seq = amp_channel(p.gain(), space())
        .unwrap()
        .apply(&loss_channel(p.mu(), space()).unwrap().apply(&rho).unwrap())
        .unwrap();
    let th = thermal_channel(eta, nbar, space()).unwrap();
    let direct = th.apply(&rho).unwrap();
    assert!(max_abs(&(seq.matrix() - direct.matrix())) < 1e-12);

    // The product Kraus set gives the same map as the stages.
    let mut sum = CMatrix::zeros(space().dim(), space().dim());
    for k in th.operators() {
        sum += k.matrix() * rho.matrix() * k.matrix().adjoint();
    }
    assert!(max_abs(&(sum - direct.matrix())) < 1e-12);

    let l = thermal_channel(eta, nbar, space()).unwrap();
    let labels: Vec<_> = l.kraus().iter().map(|k| k.label.clone()).collect();
    assert_eq!(labels[0], KrausLabel(vec![Jump::Loss(0), Jump::Gain(0)]));
    assert!(labels.iter().any(|x| x.net_loss() == -2));
}

#[test]
fn loss_is_phase_covariant() {
    let theta = 0.77;
    let rot = crate::fock::number_function_complex(space(), |n| C64::from_polar(1.0, theta * n as f64)).unwrap();
    let rho = State::pure(space(), &coherent_ket(space(), C64::new(0.9, 0.4))).unwrap();
    let ch = loss_channel(0.15, space()).unwrap();
    let r = rot.matrix();
    let rotated = State::from_matrix(space(), r.adjoint() * rho.matrix() * r).unwrap();
    let lhs = r * ch.apply(&rotated).unwrap().matrix() * r.adjoint();
    let rhs = ch.apply(&rho).unwrap();
    assert!(max_abs(&(lhs - rhs.matrix())) < 1e-12);
}

fn paulis() -> [CMatrix; 4] {
    let i = C64::new(0.0, 1.0);
    [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
        CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    ]
}

#[test]
fn qubit_damping_examples() {
    for kind in [DampingKind::Amplitude, DampingKind::Phase, DampingKind::Composite] {
        let ch = qubit_damping(0.37, kind).unwrap();
        assert!(ch.deficit() <= 1e-14);
        let id = qubit_damping(0.0, kind).unwrap();
        let rho = random_density(2, 3);
        let out = id.apply_matrix(&rho, &[2], 0).unwrap();
        assert!(max_abs(&(out - &rho)) < 1e-15);
    }
    let one = dense_qubit(0.0, 1.0);
    let out = qubit_damping(1.0, DampingKind::Amplitude).unwrap().apply_matrix(&one, &[2], 0).unwrap();
    assert!((out[(0, 0)].re - 1.0).abs() < 1e-15);

    let p = 0.3;
    let plus = CMatrix::from_element(2, 2, c(0.5));
    let out = qubit_damping(p, DampingKind::Composite).unwrap().apply_matrix(&plus, &[2], 0).unwrap();
    assert!((out[(0, 1)] - c((1.0 - p) / 2.0)).norm() < 1e-15);
}

fn dense_qubit(p0: f64, p1: f64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(p0), c(0.0), c(0.0), c(p1)])
}

/// Single-expression form with the `c±` coefficients.
fn composite_closed_form(p: f64, rho: &CMatrix) -> CMatrix {
    let s = (1.0 - p).sqrt();
    let h = 1.0 - p / 2.0;
    let cp = (1.0 + s) * (h + s) + (1.0 - s) * (h - s);
    let cm = (1.0 + s) * (h - s) + (1.0 - s) * (h + s);
    let [_, x, y, z] = paulis();
    let i = C64::new(0.0, 1.0);
    let bracket = &x * rho * &x + &y * rho * &y + rho * &z + &z * rho + (&y * rho * &x - &x * rho * &y) * i;
    (rho * c(cp) + &z * rho * &z * c(cm) + bracket * c(p)) * c(0.25)
}

#[test]
fn composite_damping_closed_form_on_pauli_basis() {
    for p in [0.0, 0.1, 0.45, 0.9, 1.0] {
        let ch = qubit_damping(p, DampingKind::Composite).unwrap();
        for basis in paulis() {
            let out = ch.apply_matrix(&basis, &[2], 0).unwrap();
            let want = composite_closed_form(p, &basis);
            assert!(max_abs(&(out - want)) < 1e-12, "p={p}");
        }
        let reversed = compose(
            &qubit_damping(p, DampingKind::Amplitude).unwrap(),
            &qubit_damping(p, DampingKind::Phase).unwrap(),
        )
        .unwrap();
        let rho = random_density(2, 9);
        let a = ch.apply_matrix(&rho, &[2], 0).unwrap();
        let b = reversed.apply_matrix(&rho, &[2], 0).unwrap();
        assert!(max_abs(&(a - b)) < 1e-14);
    }
}

#[test]
fn qutrit_damping_examples() {
    for kind in [QutritKind::CascadedAd, QutritKind::MidPd, QutritKind::Composite] {
        let ch = qutrit_damping(0.4, kind).unwrap();
        assert!(ch.deficit() <= 1e-14);
        let rho = random_density(3, 1);
        let out = qutrit_damping(0.0, kind).unwrap().apply_matrix(&rho, &[3], 0).unwrap();
        assert!(max_abs(&(out - &rho)) < 1e-15);
    }
    let p = 0.25;
    let mut two = CMatrix::zeros(3, 3);
    two[(2, 2)] = c(1.0);
    let out = qutrit_damping(p, QutritKind::CascadedAd).unwrap().apply_matrix(&two, &[3], 0).unwrap();
    assert!((out[(1, 1)].re - p).abs() < 1e-15);
    assert!((out[(2, 2)].re - (1.0 - p)).abs() < 1e-15);
    assert!(out[(0, 0)].norm() < 1e-15);

    for seed in 0..5 {
        let rho = random_density(3, 100 + seed);
        let ad = qutrit_damping(0.3, QutritKind::CascadedAd).unwrap();
        let pd = qutrit_damping(0.3, QutritKind::MidPd).unwrap();
        let a = pd.apply_matrix(&ad.apply_matrix(&rho, &[3], 0).unwrap(), &[3], 0).unwrap();
        let b = ad.apply_matrix(&pd.apply_matrix(&rho, &[3], 0).unwrap(), &[3], 0).unwrap();
        assert!(max_abs(&(a - b)) < 1e-12);
    }
}

#[test]
fn depolarizing_examples() {
    let rho = random_density(2, 5);
    let id = depolarizing(0.0).unwrap().apply_matrix(&rho, &[2], 0).unwrap();
    assert!(max_abs(&(id - &rho)) < 1e-15);
    let full = depolarizing(0.75).unwrap().apply_matrix(&rho, &[2], 0).unwrap();
    assert!(max_abs(&(full - CMatrix::identity(2, 2) * c(0.5))) < 1e-15);
    let out = depolarizing(0.3).unwrap().apply_matrix(&dense_qubit(1.0, 0.0), &[2], 0).unwrap();
    assert!(max_abs(&(out - dense_qubit(0.8, 0.2))) < 1e-15);
    assert!(depolarizing(0.3).unwrap().deficit() < 1e-14);
}

#[test]
fn ancilla_channel_leaves_fock_marginal() {
    let s = space();
    let joint_space = CompositeSpace::fock(s).with_ancilla(2).unwrap();
    let psi: CVector = coherent_ket(s, C64::new(1.0, 0.0));
    let q = CVector::from_vec(vec![c(0.6), C64::new(0.0, 0.8)]);
    let joint = State::pure(joint_space, &psi.kronecker(&q)).unwrap();
    let ch = qubit_damping(0.4, DampingKind::Composite).unwrap();
    let out = ch.apply_on_factor(&joint, 1).unwrap();
    let a = partial_trace(&joint, &[0]).unwrap();
    let b = partial_trace(&out, &[0]).unwrap();
    assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-14);
    assert!(ch.apply_on_factor(&joint, 0).is_err());
}

#[test]
fn amplified_leakage_is_an_error() {
    let s = space();
    let rho = State::pure(s, &fock_ket(s, 30).unwrap()).unwrap();
    let err = amp_channel(1.5, s).unwrap().apply(&rho).unwrap_err();
    assert!(matches!(err, Error::Leakage { .. }));
}

#[test]
fn descriptors_round_trip() {
    for src in [
        "none",
        "loss(mu=0.05)",
        "thermal(eta=0.05,nbar=0.5)",
        "gdn(eta=0.05)",
        "lossamp(mu=0.01,z=0.02)",
    ] {
        let n: CvNoise = src.parse().unwrap();
        assert_eq!(n.to_string(), src);
    }
    for src in ["none", "qdamp(p=0.1,kind=composite)", "qutrit_damp(p=0.1,kind=mid_pd)", "depol(eta=0.1)"] {
        let n: DvNoise = src.parse().unwrap();
        assert_eq!(n.to_string(), src);
    }
    assert!("loss(mu=1.2)".parse::<CvNoise>().is_err());
    assert!("loss(eta=0.1)".parse::<CvNoise>().is_err());
    assert!("qdamp(p=0.1,kind=weird)".parse::<DvNoise>().is_err());
    let n: CvNoise = "thermal(eta=0.05,nbar=0.5)".parse().unwrap();
    assert_eq!(n.with_param("nbar", 1.0).unwrap(), CvNoise::Thermal { eta: 0.05, nbar: 1.0 });
    assert!(n.with_param("mu", 0.1).is_err());
    let d: DvNoise = "qdamp(p=0.1,kind=phase)".parse().unwrap();
    assert_eq!(d.with_param("p", 0.2).unwrap().strength(), 0.2);
    assert!(d.channel(3).is_err());
}
