//! Evaluates a configuration over its sweep grid.

use bosupp::analytics::{
    avg_fidelity_suppressed, avg_fidelity_unsuppressed, bloch_average, comm_psucc_closed, psucc_closed,
    suppressed_residual_bound, teleportation_fidelity, unsuppressed_residual_bound, CLOSED_FORM_TOL,
    PERTURBATIVE_ETA_MAX,
};
use bosupp::channels::{CvNoise, DampingKind, DvNoise};
use bosupp::codes::{codespace_identity, logical_state, moments, BosonicCode};
use bosupp::fock::LEAKAGE_TOL;
use bosupp::protocols::{
    default_thetas, optimize_pqp, teleport_fidelity, Herald, LogicalProcess, PqpParams, Protocol, ProtocolSpec,
    Variant, STARVATION_TOL,
};
use bosupp::{CMatrix, Error, FockSpace, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{AverageMode, ExperimentConfig, Scheme};

/// One CSV line. Missing values are written as empty fields.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_param: String,
    pub sweep_value: f64,
    pub f_supp: Option<f64>,
    pub f_unsupp: Option<f64>,
    pub p_succ: Option<f64>,
    pub f_closed: Option<f64>,
    pub p_closed: Option<f64>,
    pub leakage: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowFault {
    Leakage,
    Starvation,
    /// Any other numerical failure.
    Numerical,
}

#[derive(Clone, Debug)]
pub struct RowOutcome {
    pub row: ResultRow,
    /// Monte Carlo standard errors of `f_supp` and `f_unsupp`.
    pub std_errors: Option<(f64, f64)>,
    /// Closed-form comparisons that exceeded their tolerance.
    pub tolerance_failures: Vec<String>,
    pub fault: Option<(RowFault, String)>,
}

/// Errors that stop a run before any row is evaluated.
#[derive(Debug)]
pub enum SetupError {
    Config(String),
    Truncation(String),
}

impl std::fmt::Display for SetupError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SetupError::Config(m) | SetupError::Truncation(m) => write!(f, "{m}"),
        }
    }
}

fn setup_error(e: Error) -> SetupError {
    match e {
        Error::Leakage { .. } => SetupError::Truncation(e.to_string()),
        e => SetupError::Config(e.to_string()),
    }
}

/// Command-line overrides applied on top of a config.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub guard: Option<usize>,
    pub seed: Option<u64>,
}

/// A config resolved against the overrides, with its code built and any
/// PQP layers optimized.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub space: FockSpace,
    pub seed: u64,
    code: Option<BosonicCode>,
    pqp: Option<PqpParams>,
}

/// One grid point: the sweep value and, with a series axis, its value.
#[derive(Clone, Copy, Debug)]
struct Point {
    series: Option<f64>,
    value: f64,
}

impl Experiment {
    pub fn new(config: ExperimentConfig, overrides: Overrides) -> Result<Self, SetupError> {
        let dim = overrides.dim.or(config.dim).unwrap_or(bosupp::fock::DEFAULT_DIM);
        let guard = overrides.guard.or(config.guard).unwrap_or(bosupp::fock::DEFAULT_GUARD);
        let space = FockSpace::new(dim, guard).map_err(setup_error)?;
        let seed = overrides.seed.unwrap_or(config.seed);
        let code = match &config.code {
            Some(c) => Some(c.build(space).map_err(setup_error)?),
            None => None,
        };
        let mut exp = Self { config, space, seed, code, pqp: None };
        // Build every grid point's protocol once so descriptor mismatches
        // surface as configuration errors rather than row faults.
        for pt in exp.points() {
            exp.protocol_at(pt).map_err(setup_error)?;
        }
        exp.pqp = exp.optimize()?;
        Ok(exp)
    }

    pub fn code(&self) -> Option<&BosonicCode> {
        self.code.as_ref()
    }

    pub fn pqp_params(&self) -> Option<&PqpParams> {
        self.pqp.as_ref()
    }

    fn points(&self) -> Vec<Point> {
        let cfg = &self.config;
        let series: Vec<Option<f64>> = match &cfg.series {
            Some(s) => s.values.iter().map(|&v| Some(v)).collect(),
            None => vec![None],
        };
        series
            .into_iter()
            .flat_map(|s| cfg.sweep.values.iter().map(move |&value| Point { series: s, value }))
            .collect()
    }

    fn noise_at(&self, pt: Point) -> bosupp::Result<(CvNoise, DvNoise)> {
        let cfg = &self.config;
        let (mut cv, mut dv) = (cfg.cv, cfg.dv);
        if let (Some(axis), Some(v)) = (&cfg.series, pt.series) {
            (cv, dv) = cfg.with_param_on(cv, dv, &axis.param, v).map_err(Error::Parameter)?;
        }
        cfg.with_param_on(cv, dv, &cfg.sweep.param, pt.value).map_err(Error::Parameter)
    }

    fn spec(&self) -> Option<&ProtocolSpec> {
        match &self.config.scheme {
            Scheme::Protocol(p) => Some(p),
            Scheme::Teleport => None,
        }
    }

    fn protocol_at(&self, pt: Point) -> bosupp::Result<Option<Protocol>> {
        let (cv, dv) = self.noise_at(pt)?;
        match (self.spec(), &self.code) {
            (None, _) => {
                if !matches!(dv, DvNoise::None | DvNoise::Qubit { kind: DampingKind::Composite, .. }) {
                    return Err(Error::Parameter(format!("teleportation takes composite damping, not '{dv}'")));
                }
                Ok(None)
            }
            (Some(spec), Some(code)) => {
                let p = Protocol::for_code(code, spec, &cv, &dv)?;
                Ok(Some(match &self.pqp {
                    Some(params) => p.with_pqp_params(params.clone())?,
                    None => p,
                }))
            }
            (Some(_), None) => Err(Error::Parameter("protocol needs a code".into())),
        }
    }

    fn optimize(&self) -> Result<Option<PqpParams>, SetupError> {
        let Some(spec) = self.spec().filter(|s| s.variant == Variant::Pqp) else {
            return Ok(None);
        };
        let code = self.code.as_ref().expect("protocols carry a code");
        let at = self.config.optimize_at.unwrap_or(self.config.sweep.values[0]);
        let series = self.config.series.as_ref().map(|s| s.values[0]);
        let p = self
            .protocol_at(Point { series, value: at })
            .map_err(setup_error)?
            .expect("PQP is a protocol");
        let opt = optimize_pqp(code, p.cv_channel(), p.dv_channel(), spec.layers, self.seed).map_err(setup_error)?;
        Ok(Some(opt.params))
    }

    /// Evaluates every grid point on the current rayon pool; rows come back
    /// in grid order.
    pub fn run(&self) -> Vec<RowOutcome> {
        self.points().par_iter().map(|&pt| self.row(pt)).collect()
    }

    fn sweep_label(&self, pt: Point) -> String {
        match (&self.config.series, pt.series) {
            (Some(axis), Some(v)) => format!("{}|{}={v}", self.config.sweep.param, axis.param),
            _ => self.config.sweep.param.clone(),
        }
    }

    fn row(&self, pt: Point) -> RowOutcome {
        let mut out = RowOutcome {
            row: ResultRow {
                sweep_param: self.sweep_label(pt),
                sweep_value: pt.value,
                f_supp: None,
                f_unsupp: None,
                p_succ: None,
                f_closed: None,
                p_closed: None,
                leakage: None,
            },
            std_errors: None,
            tolerance_failures: Vec::new(),
            fault: None,
        };
        if let Err(e) = self.fill(pt, &mut out) {
            let kind = match e {
                Error::Leakage { leakage, .. } => {
                    out.row.leakage = Some(leakage);
                    RowFault::Leakage
                }
                Error::Starvation(_) => RowFault::Starvation,
                _ => RowFault::Numerical,
            };
            out.row.f_supp = None;
            out.row.f_unsupp = None;
            out.row.p_succ = None;
            out.fault = Some((kind, e.to_string()));
        }
        out
    }

    fn fill(&self, pt: Point, out: &mut RowOutcome) -> bosupp::Result<()> {
        let (cv, dv) = self.noise_at(pt)?;
        let Some(protocol) = self.protocol_at(pt)? else {
            return self.fill_teleport(dv, out);
        };
        let code = self.code.as_ref().expect("protocols carry a code");
        let supp = checked_process(&protocol, code)?;
        let reference = Protocol::new(&ProtocolSpec::none(), &cv, &DvNoise::None, self.space)?;
        let unsupp = checked_process(&reference, code)?;
        out.row.leakage = Some(supp.leakage.max(unsupp.leakage));

        let (f_s, f_u, p) = match self.config.average {
            AverageMode::ExactHaar => (supp.mean_fidelity()?, unsupp.mean_fidelity()?, supp.mean_p_succ()),
            AverageMode::Pauli => (supp.pauli_fidelity()?, unsupp.pauli_fidelity()?, supp.mean_p_succ()),
            AverageMode::MonteCarlo { samples, seed } => {
                let seed = seed ^ self.seed;
                let (fs, es) = supp.monte_carlo_fidelity(samples, seed)?;
                let (fu, eu) = unsupp.monte_carlo_fidelity(samples, seed)?;
                out.std_errors = Some((es, eu));
                (fs, fu, supp.mean_p_succ())
            }
            AverageMode::FixedState { c0, c1_re, c1_im } => {
                let (c0, c1) = (C64::new(c0, 0.0), C64::new(c1_re, c1_im));
                (supp.fidelity(c0, c1)?, unsupp.fidelity(c0, c1)?, supp.denominator(c0, c1))
            }
        };
        out.row.f_supp = Some(f_s);
        out.row.f_unsupp = Some(f_u);
        out.row.p_succ = Some(p);

        let closed = self.closed_forms(protocol.spec(), cv, dv, code)?;
        if let Some(pc) = closed.p {
            out.row.p_closed = Some(pc);
            if (p - pc).abs() > CLOSED_FORM_TOL {
                out.tolerance_failures.push(format!("p_succ {p} vs closed form {pc}"));
            }
        }
        if let Some((fc, tol)) = closed.f {
            out.row.f_closed = Some(fc);
            if (f_s - fc).abs() > tol {
                out.tolerance_failures.push(format!("fidelity {f_s} vs closed form {fc} (tolerance {tol:.2e})"));
            }
        }
        Ok(())
    }

    fn fill_teleport(&self, dv: DvNoise, out: &mut RowOutcome) -> bosupp::Result<()> {
        let p = dv.strength();
        let f = match self.config.average {
            AverageMode::FixedState { c0, c1_re, c1_im } => {
                teleport_fidelity(p, C64::new(c0, 0.0), C64::new(c1_re, c1_im))?
            }
            _ => bloch_average(|c0, c1| teleport_fidelity(p, C64::new(c0, 0.0), c1).unwrap_or(f64::NAN), 1e-14)?,
        };
        out.row.f_supp = Some(f);
        out.row.p_succ = Some(1.0);
        out.row.p_closed = Some(1.0);
        if matches!(self.config.average, AverageMode::ExactHaar | AverageMode::Pauli) {
            let fc = teleportation_fidelity(p)?;
            out.row.f_closed = Some(fc);
            if (f - fc).abs() > 1e-12 {
                out.tolerance_failures.push(format!("teleportation fidelity {f} vs closed form {fc}"));
            }
        }
        Ok(())
    }

    fn closed_forms(&self, spec: &ProtocolSpec, cv: CvNoise, dv: DvNoise, code: &BosonicCode) -> bosupp::Result<Closed> {
        let mut closed = Closed::default();
        let Ok(params) = cv.params() else { return Ok(closed) };
        let rho: CMatrix = match self.config.average {
            AverageMode::FixedState { c0, c1_re, c1_im } => {
                logical_state(code, c0, C64::new(c1_re, c1_im))?.matrix().clone()
            }
            _ => codespace_identity(code).into_matrix(),
        };
        let haar = self.config.average == AverageMode::ExactHaar;
        // Second-order fidelities apply to loss and thermal noise only.
        let eta_nbar = match cv {
            CvNoise::Loss { mu } => Some((mu, 0.0)),
            CvNoise::Thermal { eta, nbar } => Some((eta, nbar)),
            _ => None,
        }
        .filter(|&(eta, _)| haar && eta <= PERTURBATIVE_ETA_MAX);
        let suppressed = |closed: &mut Closed| {
            if let Some((eta, nbar)) = eta_nbar {
                let m = moments(code);
                closed.f = Some((avg_fidelity_suppressed(&m, eta, nbar), suppressed_residual_bound(&m, eta, nbar)));
            }
        };
        let plain_cf = !spec.shortcut && spec.gate_noise.is_none() && spec.thetas == default_thetas(spec.k);
        match spec.variant {
            Variant::None => {
                closed.p = Some(1.0);
                if let Some((eta, nbar)) = eta_nbar {
                    let m = moments(code);
                    closed.f = Some((avg_fidelity_unsuppressed(&m, eta, nbar), unsuppressed_residual_bound(&m, eta, nbar)));
                }
            }
            Variant::Cf if plain_cf && dv.strength() == 0.0 => {
                closed.p = Some(psucc_closed(&rho, params, spec.k)?);
                if spec.k == 1 {
                    suppressed(&mut closed);
                }
            }
            Variant::Comm => {
                let p = dv.strength();
                let c = comm_psucc_closed(&rho, params, p)?;
                closed.p = Some(match spec.herald {
                    Herald::Comm00 => c.p00,
                    _ => c.both,
                });
                if p == 0.0 && spec.herald == Herald::Comm00And11 {
                    suppressed(&mut closed);
                }
            }
            _ => {}
        }
        Ok(closed)
    }
}

#[derive(Default)]
struct Closed {
    p: Option<f64>,
    /// Value and allowed deviation.
    f: Option<(f64, f64)>,
}

fn checked_process(protocol: &Protocol, code: &BosonicCode) -> bosupp::Result<LogicalProcess> {
    let lp = protocol.logical_process(code)?;
    if lp.leakage > LEAKAGE_TOL {
        return Err(Error::Leakage {
            leakage: lp.leakage,
            tolerance: LEAKAGE_TOL,
            context: format!("{} under {}", code.name(), protocol.spec()),
        });
    }
    if lp.mean_p_succ() < STARVATION_TOL {
        return Err(Error::Starvation(lp.mean_p_succ()));
    }
    Ok(lp)
}
