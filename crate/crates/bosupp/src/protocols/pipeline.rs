use super::bypass::bypass_unnormalized;
use super::cf::{cf_unnormalized, parity_shortcut};
use super::comm::{comm_unnormalized, CommHerald};
use super::engine::HeraldedResult;
use super::logical::LogicalProcess;
use super::pqp::{pqp_unnormalized, PqpParams};
use super::qutrit::qutrit_unnormalized;
use super::spec::{Herald, ProtocolSpec, Variant};
use crate::channels::{qutrit_damping, CvNoise, DampingKind, DvNoise, KrausChannel, QutritKind};
use crate::codes::BosonicCode;
use crate::error::{Error, Result};
use crate::fock::{CompositeSpace, FockSpace, State};

/// A protocol bound to its noise: everything needed to map an input state
/// to a heralded output.
#[derive(Clone, Debug)]
pub struct Protocol {
    spec: ProtocolSpec,
    cv_noise: CvNoise,
    dv_noise: DvNoise,
    cv: KrausChannel,
    dv: KrausChannel,
    pqp: PqpParams,
}

/// Qubit composite damping maps onto qutrit composite damping of the same
/// strength.
fn qutrit_noise(dv: &DvNoise) -> Result<KrausChannel> {
    match *dv {
        DvNoise::None => qutrit_damping(0.0, QutritKind::Composite),
        DvNoise::Qutrit { .. } => dv.channel(3),
        DvNoise::Qubit { p, kind: DampingKind::Composite } => qutrit_damping(p, QutritKind::Composite),
        _ => Err(Error::Parameter(format!("'{dv}' has no qutrit counterpart"))),
    }
}

fn bell_damping(dv: &DvNoise) -> Result<f64> {
    match *dv {
        DvNoise::None => Ok(0.0),
        DvNoise::Qubit { p, kind: DampingKind::Composite } => Ok(p),
        _ => Err(Error::Parameter(format!(
            "the Bell resource takes composite damping, not '{dv}'"
        ))),
    }
}

impl Protocol {
    pub fn new(spec: &ProtocolSpec, cv_noise: &CvNoise, dv_noise: &DvNoise, space: FockSpace) -> Result<Self> {
        spec.validate()?;
        if spec.shortcut {
            return Err(Error::Parameter(
                "resolve the parity shortcut against a code with Protocol::for_code".into(),
            ));
        }
        let cv = cv_noise.channel(space)?;
        let dv = match spec.variant {
            Variant::Qutrit => qutrit_noise(dv_noise)?,
            Variant::Comm => {
                bell_damping(dv_noise)?;
                dv_noise.channel(2)?
            }
            _ => dv_noise.channel(2)?,
        };
        Ok(Self {
            spec: spec.clone(),
            cv_noise: cv_noise.clone(),
            dv_noise: dv_noise.clone(),
            cv,
            dv,
            pqp: PqpParams::zero(spec.layers),
        })
    }

    /// As [`Protocol::new`], resolving the parity shortcut against `code`.
    pub fn for_code(code: &BosonicCode, spec: &ProtocolSpec, cv: &CvNoise, dv: &DvNoise) -> Result<Self> {
        let spec = if spec.shortcut {
            parity_shortcut(code, spec)?
        } else {
            spec.clone()
        };
        Self::new(&spec, cv, dv, code.space())
    }

    pub fn with_pqp_params(mut self, params: PqpParams) -> Result<Self> {
        if self.spec.variant != Variant::Pqp || params.layers.len() != self.spec.layers {
            return Err(Error::Parameter(format!(
                "{} PQP layers do not fit '{}'",
                params.layers.len(),
                self.spec
            )));
        }
        self.pqp = params;
        Ok(self)
    }

    pub fn spec(&self) -> &ProtocolSpec {
        &self.spec
    }

    pub fn cv_noise(&self) -> &CvNoise {
        &self.cv_noise
    }

    pub fn dv_noise(&self) -> &DvNoise {
        &self.dv_noise
    }

    pub fn cv_channel(&self) -> &KrausChannel {
        &self.cv
    }

    pub fn dv_channel(&self) -> &KrausChannel {
        &self.dv
    }

    /// Unnormalized heralded output and the largest leakage seen.
    pub fn unnormalized(&self, input: &State) -> Result<(State, f64)> {
        match self.spec.variant {
            Variant::None => {
                let out = self.cv.apply(input)?;
                let leak = out.guard_leakage()?;
                Ok((out, leak))
            }
            Variant::Cf => cf_unnormalized(input, &self.cv, &self.dv, &self.spec),
            Variant::Pqp => {
                let mut params = self.pqp.clone();
                params.axis = self.spec.axis;
                pqp_unnormalized(input, &self.cv, &self.dv, &params)
            }
            Variant::Qutrit => {
                let Herald::Level(j) = self.spec.herald else {
                    return Err(Error::Parameter("qutrit protocol needs a level herald".into()));
                };
                qutrit_unnormalized(input, &self.cv, &self.dv, j)
            }
            Variant::Comm => {
                let herald = match self.spec.herald {
                    Herald::Comm00 => CommHerald::Accept00,
                    Herald::Comm00And11 => CommHerald::Accept00And11,
                    h => return Err(Error::Parameter(format!("comm protocol cannot herald {h:?}"))),
                };
                comm_unnormalized(input, &self.cv, bell_damping(&self.dv_noise)?, herald)
            }
            Variant::Bypass => bypass_unnormalized(input, &self.dv, self.spec.gate_noise),
        }
    }

    pub fn run(&self, input: &State) -> Result<HeraldedResult> {
        let (out, leak) = self.unnormalized(input)?;
        HeraldedResult::new(out, leak)
    }

    pub fn logical_process(&self, code: &BosonicCode) -> Result<LogicalProcess> {
        if CompositeSpace::fock(code.space()).dim() != self.cv.dim() {
            return Err(Error::Dimension("code and channel truncations differ".into()));
        }
        LogicalProcess::build(code, |s| self.unnormalized(s))
    }
}
