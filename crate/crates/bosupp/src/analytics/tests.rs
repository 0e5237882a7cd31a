use super::*;
use crate::channels::{cv_channel, CvNoise, CvNoiseParams, DvNoise, KrausChannel};
use crate::codes::{binomial_code, cat_code, codespace_identity, logical_state, moments, BosonicCode};
use crate::fock::{fock_ket, CMatrix, CVector, CompositeSpace, FockSpace, State, C64};
use crate::protocols::{
    comm_protocol, noisy_bell, suppress_analytic, suppress_cf, CommHerald, Protocol, ProtocolSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space() -> FockSpace {
    FockSpace::default()
}

fn fock(n: usize) -> State {
    State::pure(space(), &fock_ket(space(), n).unwrap()).unwrap()
}

fn no_dv() -> KrausChannel {
    KrausChannel::identity(CompositeSpace::qudits(&[2]).unwrap()).unwrap()
}

fn codes() -> Vec<BosonicCode> {
    vec![cat_code(2, 2.0, space()).unwrap(), binomial_code(2, 4, space()).unwrap()]
}

fn noises() -> Vec<CvNoiseParams> {
    vec![
        CvNoiseParams::loss(0.1).unwrap(),
        CvNoiseParams::thermal(0.05, 0.5).unwrap(),
        CvNoiseParams::gdn(0.05).unwrap(),
        CvNoiseParams::new(0.2, 1.1).unwrap(),
    ]
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn random_code_state(code: &BosonicCode, rng: &mut ChaCha8Rng) -> State {
    let (c0, c1) = crate::codes::haar_coefficients(rng);
    logical_state(code, c0, c1).unwrap()
}

#[test]
fn psucc_examples() {
    for mu in [0.0, 0.3, 0.9] {
        let p = CvNoiseParams::loss(mu).unwrap();
        assert!((psucc_closed(fock(0).matrix(), p, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((psucc_closed(fock(1).matrix(), p, 1).unwrap() - (1.0 - mu)).abs() < 1e-15);
        assert!((psucc_single(fock(1).matrix(), p).unwrap() - (1.0 - mu)).abs() < 1e-15);
    }
    assert!(psucc_closed(fock(0).matrix(), noises()[0], 0).is_err());
}

#[test]
fn psucc_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for code in codes() {
        let rho = random_code_state(&code, &mut rng);
        let cl = codespace_identity(&code).into_matrix();
        for params in noises() {
            let cv = cv_channel(params, space()).unwrap();
            let single = psucc_single(rho.matrix(), params).unwrap();
            for k in 1..=3 {
                let sim = suppress_cf(&rho, &cv, &no_dv(), &ProtocolSpec::cf(k)).unwrap().p_succ;
                let closed = psucc_closed(rho.matrix(), params, k).unwrap();
                assert!((sim - closed).abs() < 1e-10, "{} {params:?} K={k}", code.name());
                if k == 1 {
                    assert!((closed - single).abs() < 1e-12);
                }
            }
            // Averages by linearity in ρ.
            let lp = Protocol::new(
                &ProtocolSpec::cf(1),
                &CvNoise::LossAmp { mu: params.mu(), z: params.z() },
                &DvNoise::None,
                space(),
            )
            .unwrap()
            .logical_process(&code)
            .unwrap();
            assert!((lp.mean_p_succ() - psucc_single(&cl, params).unwrap()).abs() < 1e-10);
        }
    }
}

#[test]
fn asymptotic_limit() {
    for params in noises() {
        let g = params.gain();
        assert!((psucc_asymptotic(fock(0).matrix(), params).unwrap() - 1.0 / g).abs() < 1e-15);
    }
    let p = CvNoiseParams::loss(0.3).unwrap();
    assert!((psucc_asymptotic(fock(1).matrix(), p).unwrap() - 0.7).abs() < 1e-15);
    assert_eq!(legendre(3, 0.5), vec![1.0, 0.5, -0.125, -0.4375]);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for code in codes() {
        let rho = random_code_state(&code, &mut rng);
        for params in noises() {
            let filter = suppress_analytic(&rho, params, 8).unwrap().p_succ;
            let closed = psucc_asymptotic(rho.matrix(), params).unwrap();
            assert!((filter - closed).abs() < 1e-10, "{} {params:?}", code.name());
        }
    }
    let bad = CvNoiseParams::new(0.5, 2.0).unwrap();
    assert!(psucc_asymptotic(fock(1).matrix(), bad).is_err());
}

#[test]
fn delta_p_examples() {
    let bin = binomial_code(2, 4, space()).unwrap();
    let cl = codespace_identity(&bin).into_matrix();
    for mu in [0.05, 0.2] {
        let dp = delta_p(&cl, CvNoiseParams::loss(mu).unwrap(), 4).unwrap();
        assert!(dp.exact.abs() < 1e-12);
        assert_eq!(dp.bound, 0.0);
    }
    let dp = delta_p(fock(1).matrix(), CvNoiseParams::loss(0.05).unwrap(), 1).unwrap();
    assert!(dp.exact.abs() < 1e-15);

    let cat = cat_code(2, 2.0, space()).unwrap();
    let cl = codespace_identity(&cat).into_matrix();
    let dp = delta_p(&cl, CvNoiseParams::thermal(0.05, 0.5).unwrap(), 2).unwrap();
    assert!(dp.exact > 0.0 && dp.exact <= 1.5 * dp.bound, "{dp:?}");
}

#[test]
fn fidelity_gaps_are_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for code in codes() {
        let rho = random_code_state(&code, &mut rng);
        for params in noises() {
            let inf = suppress_analytic(&rho, params, 8).unwrap();
            let f_inf = crate::fock::trace_product(rho.matrix(), inf.unnormalized.matrix()).re;
            for k in 1..=2 {
                let res = suppress_analytic(&rho, params, k).unwrap();
                let f_k = crate::fock::trace_product(rho.matrix(), res.unnormalized.matrix()).re;
                let dp = res.p_succ - inf.p_succ;
                let df_tilde = f_k - f_inf;
                assert!(df_tilde <= dp + 1e-15);
                let df = f_k / res.p_succ - f_inf / inf.p_succ;
                assert!(df < df_tilde / inf.p_succ + 1e-15);
            }
        }
    }
}

fn haar_fidelity(code: &BosonicCode, spec: &ProtocolSpec, cv: CvNoise) -> f64 {
    let lp = Protocol::new(spec, &cv, &DvNoise::None, code.space())
        .unwrap()
        .logical_process(code)
        .unwrap();
    lp.mean_fidelity().unwrap()
}

#[test]
fn suppressed_closed_form_residual_is_cubic() {
    let etas = [0.002, 0.005, 0.01, 0.02];
    for code in codes() {
        let m = moments(&code);
        for nbar in [0.0, 0.5] {
            assert_eq!(avg_fidelity_suppressed(&m, 0.0, nbar), 1.0);
            let res: Vec<f64> = etas
                .iter()
                .map(|&eta| {
                    let sim = haar_fidelity(&code, &ProtocolSpec::cf(1), CvNoise::Thermal { eta, nbar });
                    (sim - avg_fidelity_suppressed(&m, eta, nbar)).abs()
                })
                .collect();
            let s = slope(&etas, &res);
            assert!(s >= 2.7, "{} n̄={nbar}: slope {s} residuals {res:?}", code.name());
        }
    }
}

#[test]
fn unsuppressed_closed_form_residual_is_quadratic() {
    let etas = [0.002, 0.005, 0.01, 0.02];
    let bin = binomial_code(2, 4, space()).unwrap();
    assert!(moments(&bin).ca_cad.abs() < 1e-14);
    assert!(moments(&bin).cad_ca.abs() < 1e-14);
    for code in codes() {
        let m = moments(&code);
        for nbar in [0.0, 0.5] {
            assert_eq!(avg_fidelity_unsuppressed(&m, 0.0, nbar), 1.0);
            let res: Vec<f64> = etas
                .iter()
                .map(|&eta| {
                    let sim = haar_fidelity(&code, &ProtocolSpec::none(), CvNoise::Thermal { eta, nbar });
                    (sim - avg_fidelity_unsuppressed(&m, eta, nbar)).abs()
                })
                .collect();
            let s = slope(&etas, &res);
            assert!(s >= 1.8, "{} n̄={nbar}: slope {s} residuals {res:?}", code.name());
        }
    }
}

#[test]
fn residual_bounds_hold_up_to_eta_max() {
    let descs = ["cat(6, 1.916)", "sqcat(2, 2, 6dB)", "gkp(0.3)"];
    for d in descs {
        let code = d.parse::<crate::codes::CodeSpec>().unwrap().build(crate::selftest::space_for(d)).unwrap();
        let m = moments(&code);
        for (eta, nbar) in [(0.05, 0.0), (PERTURBATIVE_ETA_MAX, 0.0), (0.05, 0.5), (PERTURBATIVE_ETA_MAX, 0.5)] {
            let cv = CvNoise::Thermal { eta, nbar };
            let gap = (haar_fidelity(&code, &ProtocolSpec::cf(1), cv) - avg_fidelity_suppressed(&m, eta, nbar)).abs();
            assert!(gap < suppressed_residual_bound(&m, eta, nbar), "{d} η={eta} n̄={nbar}: {gap}");
            let gap = (haar_fidelity(&code, &ProtocolSpec::none(), cv) - avg_fidelity_unsuppressed(&m, eta, nbar)).abs();
            assert!(gap < unsuppressed_residual_bound(&m, eta, nbar), "{d} η={eta} n̄={nbar}: {gap}");
        }
    }
}

#[test]
fn perturbative_tables_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let code = cat_code(2, 2.0, space()).unwrap();
    let rho = random_code_state(&code, &mut rng);
    let e = PerturbativeExpansion::new(&rho).unwrap();
    assert!(crate::fock::max_abs(&(&e.r[0][0] - rho.matrix())) < 1e-15);
    let t1 = crate::fock::number_function(space(), |k| k as f64 / 2.0).unwrap().into_matrix();
    let mean_t1 = rho.expect(&crate::fock::Operator::new(space(), t1.clone()).unwrap()).unwrap();
    let lin = rho.matrix() * (mean_t1 * 2.0) - (&t1 * rho.matrix() + rho.matrix() * &t1);
    assert!(crate::fock::max_abs(&(&e.r[1][0] - &lin)) < 1e-12);
    assert!(crate::fock::max_abs(&(&e.r[0][1] - &lin)) < 1e-12);

    // Q is the order-2 inverse of C.
    for _ in 0..5 {
        let (mu, z): (f64, f64) = (rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3));
        let mut qs = 0.0;
        for j in 0..3 {
            for k in 0..3 - j {
                qs += e.q[j][k] * z.powi(j as i32) * mu.powi(k as i32);
            }
        }
        assert!((e.p_succ(mu, z) * qs - 1.0).abs() < 1e-6);
    }

    let out = perturbative_state(&rho, 0.0, 0.0).unwrap();
    assert!(crate::fock::max_abs(&(out.matrix() - rho.matrix())) < 1e-15);
}

#[test]
fn formal_continuation_matches_filter() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let code = binomial_code(2, 4, space()).unwrap();
    let rho = random_code_state(&code, &mut rng);
    let params = CvNoiseParams::from_mu_z(0.02, 0.01).unwrap();
    let formal = formal_filtered(rho.matrix(), params.mu(), params.z(), 1).unwrap();
    let exact = suppress_analytic(&rho, params, 1).unwrap();
    assert!(crate::fock::max_abs(&(formal - exact.unnormalized.matrix())) < 1e-12);
}

#[test]
fn perturbative_state_tracks_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let code = cat_code(2, 2.0, space()).unwrap();
    let rho = random_code_state(&code, &mut rng);
    let e = PerturbativeExpansion::new(&rho).unwrap();
    let ss = [1e-3, 2e-3, 5e-3, 1e-2];
    let mut un = Vec::new();
    let mut norm = Vec::new();
    for &s in &ss {
        let params = CvNoiseParams::from_mu_z(s, s).unwrap();
        let cv = cv_channel(params, space()).unwrap();
        let sim = suppress_cf(&rho, &cv, &no_dv(), &ProtocolSpec::cf(1)).unwrap();
        un.push(crate::fock::max_abs(&(e.unnormalized(s, s) - sim.unnormalized.matrix())));
        norm.push(e.normalized(s, s).unwrap().trace_distance(&sim.normalized).unwrap());
    }
    assert!(slope(&ss, &un) >= 2.7, "{un:?}");
    assert!(slope(&ss, &norm) >= 2.7, "{norm:?}");
}

#[test]
fn fidelity_has_no_linear_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for code in codes() {
        for _ in 0..3 {
            let rho = random_code_state(&code, &mut rng);
            let (dmu, dz) = fidelity_linear_coefficients(&rho, 1, 1e-4).unwrap();
            assert!(dmu.abs() <= 1e-8 && dz.abs() <= 1e-8, "{dmu} {dz}");
        }
    }
    // Without the filter the linear term is there.
    let rho = random_code_state(&codes()[0], &mut rng);
    let (dmu, _) = fidelity_linear_coefficients(&rho, 0, 1e-4).unwrap();
    assert!(dmu.abs() > 1e-3);
}

/// Bell measurement on the input and the first half of a damped `Φ+`, then
/// Pauli correction on the second half.
fn simulate_teleportation(p: f64, psi: [C64; 2]) -> f64 {
    let bell = noisy_bell(p).unwrap();
    let input = CVector::from_vec(psi.to_vec());
    let rho = (&input * input.adjoint()).kronecker(&bell);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |v: [f64; 4]| CVector::from_iterator(4, v.iter().map(|x| C64::new(x * s, 0.0)));
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let sx = CMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
    let sz = CMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]);
    let outcomes = [
        (c([1.0, 0.0, 0.0, 1.0]), CMatrix::identity(2, 2)),
        (c([1.0, 0.0, 0.0, -1.0]), sz.clone()),
        (c([0.0, 1.0, 1.0, 0.0]), sx.clone()),
        (c([0.0, 1.0, -1.0, 0.0]), &sz * &sx),
    ];
    let mut out = CMatrix::zeros(2, 2);
    for (b, u) in outcomes {
        let proj = (b.adjoint()).kronecker(&CMatrix::identity(2, 2));
        let branch = &proj * &rho * proj.adjoint();
        out += &u * branch * u.adjoint();
    }
    (input.adjoint() * out * input)[(0, 0)].re
}

#[test]
fn teleportation() {
    for (p, f) in [(0.0, 1.0), (1.0, 2.0 / 3.0), (0.5, 2.0 / 3.0)] {
        assert!((teleportation_fidelity(p).unwrap() - f).abs() < 1e-15);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        for _ in 0..5 {
            let (c0, c1) = crate::codes::haar_coefficients(&mut rng);
            let sim = simulate_teleportation(p, [C64::new(c0, 0.0), c1]);
            let closed = teleportation_state_fidelity(p, c0 * c0).unwrap();
            assert!((sim - closed).abs() < 1e-14, "p={p}");
        }
        let avg = bloch_average(|c0, c1| simulate_teleportation(p, [C64::new(c0, 0.0), c1]), 1e-14).unwrap();
        assert!((avg - teleportation_fidelity(p).unwrap()).abs() < 1e-14);
    }
    assert!(teleportation_fidelity(1.5).is_err());
}

#[test]
fn comm_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for code in codes() {
        let rho = random_code_state(&code, &mut rng);
        for params in noises() {
            let cv = cv_channel(params, space()).unwrap();
            for p in [0.0, 0.1, 0.4] {
                let closed = comm_psucc_closed(rho.matrix(), params, p).unwrap();
                let both = comm_protocol(&rho, &cv, p, CommHerald::Accept00And11).unwrap().p_succ;
                let p00 = comm_protocol(&rho, &cv, p, CommHerald::Accept00).unwrap().p_succ;
                assert!((both - closed.both).abs() < 1e-10);
                assert!((p00 - closed.p00).abs() < 1e-10, "{} p={p}", code.name());
                assert!((both - p00 - closed.p11).abs() < 1e-10);
            }
            let closed = comm_psucc_closed(rho.matrix(), params, 0.0).unwrap();
            assert!((closed.both - psucc_single(rho.matrix(), params).unwrap()).abs() < 1e-15);
        }
    }
}
