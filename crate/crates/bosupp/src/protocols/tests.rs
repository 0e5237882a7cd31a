use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use super::*;
use crate::channels::{
    cv_channel, gdn_channel, loss_channel, qubit_damping, thermal_channel, CvNoise, CvNoiseParams,
    DampingKind, DvNoise, KrausChannel,
};
use crate::codes::{binomial_code, cat_code, logical_state, BosonicCode, CodeParams};
use crate::fock::{coherent_ket, fock_ket, CMatrix, CVector, CompositeSpace, FockSpace, State, C64};

fn space() -> FockSpace {
    FockSpace::default()
}

fn fock_state(n: usize) -> State {
    State::pure(space(), &fock_ket(space(), n).unwrap()).unwrap()
}

fn no_dv() -> KrausChannel {
    KrausChannel::identity(CompositeSpace::qudits(&[2]).unwrap()).unwrap()
}

fn code_state(code: &BosonicCode) -> State {
    logical_state(code, 0.6, C64::new(0.48, 0.64)).unwrap()
}

#[test]
fn conditional_rotation_examples() {
    let s = space();
    let u = conditional_rotation(0.0, X_AXIS, s).unwrap();
    assert_eq!(crate::fock::max_abs(&(u.matrix() - CMatrix::identity(2 * s.dim(), 2 * s.dim()))), 0.0);

    let u = conditional_rotation(FRAC_PI_2, X_AXIS, s).unwrap();
    let ket = |n: usize, a: usize| {
        let mut v = CVector::zeros(2 * s.dim());
        v[2 * n + a] = C64::new(1.0, 0.0);
        v
    };
    let out = u.apply(&ket(2, 0)).unwrap();
    assert!((out - ket(2, 0) * C64::new(-1.0, 0.0)).norm() < 1e-15);
    let out = u.apply(&ket(1, 0)).unwrap();
    assert!((out - ket(1, 1) * C64::new(0.0, 1.0)).norm() < 1e-15);

    let axis = [0.6, 0.0, 0.8];
    let u = conditional_rotation(0.37, axis, s).unwrap().into_matrix();
    let d = 2 * s.dim();
    assert!(crate::fock::max_abs(&(&u * u.adjoint() - CMatrix::identity(d, d))) < 1e-12);
    assert!(conditional_rotation(0.1, [1.0, 0.1, 0.0], s).is_err());
}

#[test]
fn single_photon_loss_is_rejected() {
    let mu = 0.2;
    let cv = loss_channel(mu, space()).unwrap();
    let res = suppress_cf(&fock_state(1), &cv, &no_dv(), &ProtocolSpec::cf(1)).unwrap();
    assert!((res.p_succ - (1.0 - mu)).abs() < 1e-14);
    assert!((res.normalized.matrix()[(1, 1)].re - 1.0).abs() < 1e-14);
    assert!(res.normalized.matrix()[(0, 0)].norm() < 1e-15);
}

#[test]
fn noiseless_channel_is_transparent() {
    let code = cat_code(2, 2.0, space()).unwrap();
    let rho = code_state(&code);
    let cv = loss_channel(0.0, space()).unwrap();
    for k in 1..=2 {
        let res = suppress_cf(&rho, &cv, &no_dv(), &ProtocolSpec::cf(k)).unwrap();
        assert!((res.p_succ - 1.0).abs() < 1e-12);
        assert!(res.normalized.trace_distance(&rho).unwrap() < 1e-12);
    }
}

#[test]
fn miscalibration_leaks_quadratically() {
    let mu = 0.3;
    let cv = loss_channel(mu, space()).unwrap();
    for eps in [0.01, 0.05, 0.2] {
        let mut spec = ProtocolSpec::cf(1);
        spec.thetas = vec![FRAC_PI_2 + eps];
        let res = suppress_cf(&fock_state(1), &cv, &no_dv(), &spec).unwrap();
        let leak = res.unnormalized.matrix()[(0, 0)].re;
        assert!((leak - mu * eps.sin().powi(2)).abs() < 1e-14, "eps={eps}");
        let params = CvNoiseParams::loss(mu).unwrap();
        let an = suppress_analytic_thetas(&fock_state(1), params, &spec.thetas).unwrap();
        assert!((an.unnormalized.matrix()[(0, 0)].re - leak).abs() < 1e-14);
    }
}

#[test]
fn filter_residues() {
    assert!(!passes_filter(1, 1));
    assert!(passes_filter(4, 2));
    assert!(passes_filter(-4, 2));
    assert!(!passes_filter(2, 2));
    assert!(passes_filter(0, 3));
    let thetas = default_thetas(2);
    assert!(filter_weight(2, &thetas) < 1e-30);
    assert!((filter_weight(4, &thetas) - 1.0).abs() < 1e-15);
    let vac = fock_state(0);
    let res = suppress_analytic(&vac, CvNoiseParams::loss(0.4).unwrap(), 1).unwrap();
    assert!((res.p_succ - 1.0).abs() < 1e-15);
}

#[test]
fn analytic_filter_matches_joint_simulation() {
    let codes = [cat_code(2, 2.0, space()).unwrap(), binomial_code(2, 4, space()).unwrap()];
    let noises = [
        CvNoiseParams::loss(0.1).unwrap(),
        CvNoiseParams::thermal(0.05, 0.5).unwrap(),
        CvNoiseParams::gdn(0.05).unwrap(),
    ];
    for code in &codes {
        let rho = code_state(code);
        for params in noises {
            let cv = cv_channel(params, space()).unwrap();
            for k in 1..=3 {
                let full = suppress_cf(&rho, &cv, &no_dv(), &ProtocolSpec::cf(k)).unwrap();
                let fast = suppress_analytic(&rho, params, k).unwrap();
                assert!((full.p_succ - fast.p_succ).abs() < 1e-10);
                let td = full.unnormalized.trace_distance(&fast.unnormalized).unwrap();
                assert!(td < 1e-10, "{} {params:?} K={k}: {td}", code.name());
            }
        }
    }
}

#[test]
fn fock_filter_support() {
    let cv = thermal_channel(0.1, 0.5, space()).unwrap();
    for (n, k) in [(3, 1), (3, 2), (5, 2), (4, 3)] {
        let res = suppress_cf(&fock_state(n), &cv, &no_dv(), &ProtocolSpec::cf(k)).unwrap();
        let pops = res.unnormalized.fock_populations().unwrap();
        for (m, p) in pops.iter().enumerate() {
            if (m as isize - n as isize).rem_euclid(1 << k) != 0 {
                assert!(*p <= 1e-12, "n={n} K={k} m={m}: {p}");
            }
        }
    }
}

fn odd_code() -> BosonicCode {
    let s = space();
    let v3 = fock_ket(s, 3).unwrap();
    let v5 = fock_ket(s, 5).unwrap();
    let zero = (fock_ket(s, 1).unwrap() + &v5) * C64::new(FRAC_1_SQRT_2, 0.0);
    BosonicCode::new("odd", s, zero, v3, CodeParams::Custom).unwrap()
}

#[test]
fn parity_shortcut_matches_full_protocol() {
    let cv = thermal_channel(0.05, 0.5, space()).unwrap();
    for code in [binomial_code(2, 4, space()).unwrap(), odd_code()] {
        let rho = code_state(&code);
        let spec = ProtocolSpec::cf(1);
        let short = parity_shortcut(&code, &spec).unwrap();
        let a = suppress_cf(&rho, &cv, &no_dv(), &spec).unwrap();
        let b = suppress_cf(&rho, &cv, &no_dv(), &short).unwrap();
        assert!((a.p_succ - b.p_succ).abs() < 1e-12);
        assert!(crate::fock::max_abs(&(a.unnormalized.matrix() - b.unnormalized.matrix())) < 1e-12);

        let f0 = b.fidelity(&rho).unwrap();
        for p in [0.1, 0.2, 0.3] {
            let dv = qubit_damping(p, DampingKind::Composite).unwrap();
            let f = suppress_cf(&rho, &cv, &dv, &short).unwrap().fidelity(&rho).unwrap();
            assert!((f - f0).abs() < 1e-10, "{}: p={p}", code.name());
        }
    }
    let cat = cat_code(2, 2.0, space()).unwrap();
    assert!(parity_shortcut(&cat, &ProtocolSpec::cf(1)).is_err());
}

#[test]
fn pqp_zero_layers_is_cf() {
    let code = cat_code(2, 2.0, space()).unwrap();
    let rho = code_state(&code);
    let cv = loss_channel(0.05, space()).unwrap();
    let dv = qubit_damping(0.1, DampingKind::Composite).unwrap();
    let cf = suppress_cf(&rho, &cv, &dv, &ProtocolSpec::cf(1)).unwrap();
    let pqp = pqp_condrot(&rho, &cv, &dv, &PqpParams::zero(0)).unwrap();
    assert_eq!(cf.unnormalized.matrix(), pqp.unnormalized.matrix());
    let pqp1 = pqp_condrot(&rho, &cv, &dv, &PqpParams::zero(1)).unwrap();
    assert!(crate::fock::max_abs(&(cf.unnormalized.matrix() - pqp1.unnormalized.matrix())) < 1e-12);

    let u = pqp_unitary(
        &PqpParams {
            layers: vec![PqpLayer { beta_p1: 0.3, beta_q: -0.2, beta_p2: 0.1, theta: 1.0 }],
            axis: X_AXIS,
        },
        space(),
    )
    .unwrap();
    let d = 2 * space().dim();
    assert!(crate::fock::max_abs(&(&u * u.adjoint() - CMatrix::identity(d, d))) < 1e-10);
}

#[test]
fn pqp_optimizer_never_loses_to_cf() {
    let small = FockSpace::new(16, 4).unwrap();
    let code = cat_code(2, 1.0, small).unwrap();
    let cv = loss_channel(0.1, small).unwrap();
    let dv = qubit_damping(0.05, DampingKind::Composite).unwrap();
    let cf = pqp_mean_fidelity(&code, &cv, &dv, &PqpParams::zero(0)).unwrap();
    let opt = optimize_pqp(&code, &cv, &dv, 1, 3).unwrap();
    assert!(opt.mean_fidelity >= cf - 1e-12);
    assert!(opt.evaluations > 100, "{}", opt.evaluations);
    let again = optimize_pqp(&code, &cv, &dv, 1, 3).unwrap();
    assert_eq!(opt.params, again.params);
}

#[test]
fn comm_reduces_to_local() {
    let code = binomial_code(2, 4, space()).unwrap();
    let rho = code_state(&code);
    let cv = thermal_channel(0.05, 0.5, space()).unwrap();
    let local = suppress_cf(&rho, &cv, &no_dv(), &ProtocolSpec::cf(1)).unwrap();
    let both = comm_protocol(&rho, &cv, 0.0, CommHerald::Accept00And11).unwrap();
    assert!((both.p_succ - local.p_succ).abs() < 1e-12);
    assert!(both.normalized.trace_distance(&local.normalized).unwrap() < 1e-12);
    let only = comm_protocol(&rho, &cv, 0.0, CommHerald::Accept00).unwrap();
    assert!((2.0 * only.p_succ - local.p_succ).abs() < 1e-12);
    assert!(only.normalized.trace_distance(&local.normalized).unwrap() < 1e-12);
}

#[test]
fn comm_herald_ordering() {
    let code = binomial_code(2, 4, space()).unwrap();
    let cv = CvNoise::Thermal { eta: 0.05, nbar: 0.5 };
    let dv = DvNoise::Qubit { p: 0.2, kind: DampingKind::Composite };
    let run = |both| {
        Protocol::new(&ProtocolSpec::comm(both), &cv, &dv, space())
            .unwrap()
            .logical_process(&code)
            .unwrap()
    };
    let (only, both) = (run(false), run(true));
    assert!(only.mean_fidelity().unwrap() >= both.mean_fidelity().unwrap());
    assert!(only.mean_p_succ() < both.mean_p_succ());
}

#[test]
fn noisy_bell_closed_form() {
    let p: f64 = 0.3;
    let rho = noisy_bell(p).unwrap();
    let q = 1.0 - p;
    let expect = [
        ((0, 0), 0.5 * (1.0 + p * p)),
        ((3, 3), 0.5 * q * q),
        ((1, 1), 0.5 * p * q),
        ((2, 2), 0.5 * p * q),
        ((0, 3), 0.5 * q * q),
        ((3, 0), 0.5 * q * q),
    ];
    let mut m = CMatrix::zeros(4, 4);
    for ((i, j), v) in expect {
        m[(i, j)] = C64::new(v, 0.0);
    }
    assert!(crate::fock::max_abs(&(rho - m)) < 1e-15);
}

fn d_q(p: f64, parity: usize) -> [f64; 3] {
    let s = if parity % 2 == 0 { 1.0 } else { -1.0 } * (1.0 - p).sqrt();
    [0.5 * (1.0 - p / 2.0 + s), 0.5 * (1.0 - p / 2.0 - s), 0.5 * p]
}

#[test]
fn qutrit_single_photon_closed_form() {
    let (mu, p) = (0.25, 0.4);
    let cv = loss_channel(mu, space()).unwrap();
    for j in 0..3 {
        let res = qutrit_protocol(&fock_state(1), &cv, p, j).unwrap();
        let m = res.unnormalized.matrix();
        assert!((m[(1, 1)].re - (1.0 - mu) * d_q(p, 0)[j]).abs() < 1e-14, "j={j}");
        assert!((m[(0, 0)].re - mu * d_q(p, 1)[j]).abs() < 1e-14, "j={j}");
    }
}

#[test]
fn qutrit_success_and_failure_branches() {
    let code = cat_code(2, 2.0, space()).unwrap();
    let rho = code_state(&code);
    let params = CvNoiseParams::thermal(0.05, 0.5).unwrap();
    let cv = cv_channel(params, space()).unwrap();
    let noisy = cv.apply(&rho).unwrap();
    let even = suppress_analytic(&rho, params, 1).unwrap().p_succ;
    let delta = 2.0 * even - noisy.weight();
    let p = 0.3;
    let mut total = 0.0;
    for j in 0..3 {
        let res = qutrit_protocol(&rho, &cv, p, j).unwrap();
        total += res.p_succ;
        if j < 2 {
            let sign = if j == 0 { 1.0 } else { -1.0 };
            let pj = noisy.weight() * (1.0 - p / 2.0) / 2.0 + sign * (1.0 - p).sqrt() * delta / 2.0;
            assert!((res.p_succ - pj).abs() < 1e-12, "j={j}");
        } else {
            let expect = noisy.matrix() * C64::new(p / 2.0, 0.0);
            assert!(crate::fock::max_abs(&(res.unnormalized.matrix() - expect)) < 1e-14);
        }
    }
    assert!((total - noisy.weight()).abs() < 1e-12);

    let qubit = suppress_cf(&rho, &cv, &no_dv(), &ProtocolSpec::cf(1)).unwrap();
    let qutrit = qutrit_protocol(&rho, &cv, 0.0, 0).unwrap();
    assert!((qubit.p_succ - qutrit.p_succ).abs() < 1e-10);
    assert!(qubit.normalized.trace_distance(&qutrit.normalized).unwrap() < 1e-10);
}

fn hybrid_input(alpha: f64, beta: f64) -> State {
    let s = space();
    let a = coherent_ket(s, C64::new(alpha, 0.0));
    let b = coherent_ket(s, C64::new(beta, 0.0));
    let e0 = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let e1 = CVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    let ket = (a.kronecker(&e0) + b.kronecker(&e1)) * C64::new(FRAC_1_SQRT_2, 0.0);
    let ket = &ket / C64::new(ket.norm(), 0.0);
    State::pure(CompositeSpace::fock(s).with_ancilla(2).unwrap(), &ket).unwrap()
}

#[test]
fn hybrid_protection() {
    let rho = hybrid_input(1.5, -1.5);
    let spec = ProtocolSpec::cf(1);
    let res = protect_hybrid(&rho, &loss_channel(0.0, space()).unwrap(), &spec).unwrap();
    assert!((res.p_succ - 1.0).abs() < 1e-12);
    assert!(res.normalized.trace_distance(&rho).unwrap() < 1e-12);

    // Even-l terms of the loss expansion, summed by hand.
    let eta = 0.05;
    let cv = loss_channel(eta, space()).unwrap();
    let res = protect_hybrid(&rho, &cv, &spec).unwrap();
    let dims = rho.space().factor_dims();
    let mut oracle = CMatrix::zeros(rho.dim(), rho.dim());
    for k in cv.kraus() {
        if k.label.net_loss() % 2 == 0 {
            crate::fock::apply::sandwich_add(rho.matrix(), &dims, 0, &k.op, &mut oracle).unwrap();
        }
    }
    assert!(crate::fock::max_abs(&(res.unnormalized.matrix() - oracle)) < 1e-14);

    let unsupp = cv.apply(&rho).unwrap();
    let f_unsupp = crate::fock::fidelity(&rho, &unsupp).unwrap();
    assert!(res.fidelity(&rho).unwrap() > f_unsupp);
}

#[test]
fn bypass_noiseless_and_noisy() {
    let code = cat_code(4, 2.0, space()).unwrap();
    let rho = code_state(&code);
    let res = bypass_model(&rho, &no_dv(), None).unwrap();
    assert!((res.p_succ - 1.0).abs() < 1e-12);
    assert!(res.normalized.trace_distance(&rho).unwrap() < 1e-12);
    let g = GateNoise { loss: 0.01, damping: 0.01 };
    let noisy = bypass_model(&rho, &no_dv(), Some(g)).unwrap();
    assert!(noisy.fidelity(&rho).unwrap() < 1.0 - 1e-4);
}

#[test]
fn logical_process_averages() {
    let code = cat_code(2, 2.0, space()).unwrap();
    let proto = Protocol::new(
        &ProtocolSpec::cf(1),
        &CvNoise::Thermal { eta: 0.05, nbar: 0.5 },
        &DvNoise::Qubit { p: 0.1, kind: DampingKind::Composite },
        space(),
    )
    .unwrap();
    let lp = proto.logical_process(&code).unwrap();
    let (c0, c1) = (C64::new(0.6, 0.0), C64::new(0.48, 0.64));
    let direct = proto.run(&code_state(&code)).unwrap();
    assert!((lp.denominator(c0, c1) - direct.p_succ).abs() < 1e-12);
    assert!((lp.fidelity(c0, c1).unwrap() - direct.fidelity(&code_state(&code)).unwrap()).abs() < 1e-12);

    let exact = lp.mean_fidelity().unwrap();
    let (mc, se) = lp.monte_carlo_fidelity(20_000, 7).unwrap();
    assert!((mc - exact).abs() < 4.0 * se + 1e-12);
    let pauli = lp.pauli_fidelity().unwrap();
    assert!((pauli - exact).abs() < 1e-2);
    assert!(lp.mean_p_succ() > 0.5 && lp.mean_p_succ() <= 1.0);
}

#[test]
fn protocol_spec_descriptors() {
    for s in ["cf(K=1)", "cf(K=3)", "pqp(L=2)", "qutrit(herald=0)", "comm(herald=00)", "none", "comm(herald=00_11)"] {
        let spec: ProtocolSpec = s.parse().unwrap();
        let again: ProtocolSpec = spec.to_string().parse().unwrap();
        assert_eq!(spec, again, "{s}");
    }
    let spec: ProtocolSpec = "cf(K=2)".parse().unwrap();
    assert_eq!(spec.thetas, default_thetas(2));
    let spec: ProtocolSpec = "cf(K=1,shortcut=true)".parse().unwrap();
    assert!(spec.shortcut);
    assert!("cf(K=0)".parse::<ProtocolSpec>().is_err());
    assert!("qutrit(herald=3)".parse::<ProtocolSpec>().is_err());
    assert!("cf(L=2)".parse::<ProtocolSpec>().is_err());
    let code = binomial_code(2, 4, space()).unwrap();
    let cv = CvNoise::Loss { mu: 0.05 };
    assert!(Protocol::new(&spec, &cv, &DvNoise::None, space()).is_err());
    assert!(Protocol::for_code(&code, &spec, &cv, &DvNoise::None).is_ok());
}

#[test]
fn gdn_and_thermal_succeed() {
    let rho = fock_state(2);
    for cv in [gdn_channel(0.05, space()).unwrap(), thermal_channel(0.05, 0.5, space()).unwrap()] {
        let res = suppress_cf(&rho, &cv, &no_dv(), &ProtocolSpec::cf(1)).unwrap();
        assert!(res.p_succ > 0.5 && res.p_succ <= 1.0);
    }
}
