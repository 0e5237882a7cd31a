use std::fmt;
use std::str::FromStr;

use super::{
    cv_channel, depolarizing, qubit_damping, qutrit_damping, CvNoiseParams, DampingKind, KrausChannel, QutritKind,
};
use crate::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::fock::FockSpace;

/// Bosonic noise descriptor, e.g. `thermal(eta=0.05,nbar=0.5)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CvNoise {
    None,
    Loss { mu: f64 },
    Thermal { eta: f64, nbar: f64 },
    Gdn { eta: f64 },
    LossAmp { mu: f64, z: f64 },
}

impl CvNoise {
    pub fn params(&self) -> Result<CvNoiseParams> {
        match *self {
            CvNoise::None => CvNoiseParams::loss(0.0),
            CvNoise::Loss { mu } => CvNoiseParams::loss(mu),
            CvNoise::Thermal { eta, nbar } => CvNoiseParams::thermal(eta, nbar),
            CvNoise::Gdn { eta } => CvNoiseParams::gdn(eta),
            CvNoise::LossAmp { mu, z } => CvNoiseParams::from_mu_z(mu, z),
        }
    }

    pub fn channel(&self, space: FockSpace) -> Result<KrausChannel> {
        cv_channel(self.params()?, space)
    }

    /// Copy with the named parameter replaced, for sweeps.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let mut out = *self;
        let slot = match (&mut out, name) {
            (CvNoise::Loss { mu }, "mu") => mu,
            (CvNoise::Thermal { eta, .. }, "eta") => eta,
            (CvNoise::Thermal { nbar, .. }, "nbar") => nbar,
            (CvNoise::Gdn { eta }, "eta") => eta,
            (CvNoise::LossAmp { mu, .. }, "mu") => mu,
            (CvNoise::LossAmp { z, .. }, "z") => z,
            _ => return Err(Error::Parameter(format!("'{self}' has no parameter '{name}'"))),
        };
        *slot = value;
        out.params()?;
        Ok(out)
    }
}

impl fmt::Display for CvNoise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CvNoise::None => write!(f, "none"),
            CvNoise::Loss { mu } => write!(f, "loss(mu={mu})"),
            CvNoise::Thermal { eta, nbar } => write!(f, "thermal(eta={eta},nbar={nbar})"),
            CvNoise::Gdn { eta } => write!(f, "gdn(eta={eta})"),
            CvNoise::LossAmp { mu, z } => write!(f, "lossamp(mu={mu},z={z})"),
        }
    }
}

impl FromStr for CvNoise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let d = Descriptor::parse(s)?;
        let noise = match d.name.as_str() {
            "none" => {
                d.expect_arity(0)?;
                CvNoise::None
            }
            "loss" => {
                d.only_keywords(&["mu"])?;
                CvNoise::Loss { mu: d.f64_kw("mu")? }
            }
            "thermal" => {
                d.only_keywords(&["eta", "nbar"])?;
                CvNoise::Thermal {
                    eta: d.f64_kw("eta")?,
                    nbar: d.f64_kw("nbar")?,
                }
            }
            "gdn" => {
                d.only_keywords(&["eta"])?;
                CvNoise::Gdn { eta: d.f64_kw("eta")? }
            }
            "lossamp" => {
                d.only_keywords(&["mu", "z"])?;
                CvNoise::LossAmp {
                    mu: d.f64_kw("mu")?,
                    z: d.f64_kw("z")?,
                }
            }
            other => return Err(Error::Parse(format!("unknown CV noise '{other}'"))),
        };
        noise.params()?;
        Ok(noise)
    }
}

/// Ancilla noise descriptor, e.g. `qdamp(p=0.1,kind=composite)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DvNoise {
    None,
    Qubit { p: f64, kind: DampingKind },
    Qutrit { p: f64, kind: QutritKind },
    Depol { eta: f64 },
}

impl DvNoise {
    /// Channel on an ancilla of dimension `d`; `None` gives the identity.
    pub fn channel(&self, d: usize) -> Result<KrausChannel> {
        let need = match self {
            DvNoise::None => d,
            DvNoise::Qutrit { .. } => 3,
            _ => 2,
        };
        if need != d {
            return Err(Error::Dimension(format!("'{self}' acts on dimension {need}, not {d}")));
        }
        match *self {
            DvNoise::None => KrausChannel::identity(crate::fock::CompositeSpace::qudits(&[d])?),
            DvNoise::Qubit { p, kind } => qubit_damping(p, kind),
            DvNoise::Qutrit { p, kind } => qutrit_damping(p, kind),
            DvNoise::Depol { eta } => depolarizing(eta),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, DvNoise::None)
    }

    /// Damping strength, or the depolarizing rate.
    pub fn strength(&self) -> f64 {
        match *self {
            DvNoise::None => 0.0,
            DvNoise::Qubit { p, .. } | DvNoise::Qutrit { p, .. } => p,
            DvNoise::Depol { eta } => eta,
        }
    }

    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let mut out = *self;
        let slot = match (&mut out, name) {
            (DvNoise::Qubit { p, .. }, "p") => p,
            (DvNoise::Qutrit { p, .. }, "p") => p,
            (DvNoise::Depol { eta }, "eta") => eta,
            _ => return Err(Error::Parameter(format!("'{self}' has no parameter '{name}'"))),
        };
        *slot = value;
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        let v = self.strength();
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Parameter(format!("'{self}': strength outside [0,1]")));
        }
        Ok(())
    }
}

fn damping_name(k: DampingKind) -> &'static str {
    match k {
        DampingKind::Amplitude => "amplitude",
        DampingKind::Phase => "phase",
        DampingKind::Composite => "composite",
    }
}

fn qutrit_name(k: QutritKind) -> &'static str {
    match k {
        QutritKind::CascadedAd => "cascaded_ad",
        QutritKind::MidPd => "mid_pd",
        QutritKind::Composite => "composite",
    }
}

impl fmt::Display for DvNoise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DvNoise::None => write!(f, "none"),
            DvNoise::Qubit { p, kind } => write!(f, "qdamp(p={p},kind={})", damping_name(kind)),
            DvNoise::Qutrit { p, kind } => write!(f, "qutrit_damp(p={p},kind={})", qutrit_name(kind)),
            DvNoise::Depol { eta } => write!(f, "depol(eta={eta})"),
        }
    }
}

impl FromStr for DvNoise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let d = Descriptor::parse(s)?;
        let kind_of = |d: &Descriptor| d.keyword("kind").unwrap_or("composite").to_string();
        let noise = match d.name.as_str() {
            "none" => {
                d.expect_arity(0)?;
                DvNoise::None
            }
            "qdamp" => {
                d.only_keywords(&["p", "kind"])?;
                let kind = match kind_of(&d).as_str() {
                    "amplitude" => DampingKind::Amplitude,
                    "phase" => DampingKind::Phase,
                    "composite" => DampingKind::Composite,
                    k => return Err(Error::Parse(format!("'{s}': unknown damping kind '{k}'"))),
                };
                DvNoise::Qubit { p: d.f64_kw("p")?, kind }
            }
            "qutrit_damp" => {
                d.only_keywords(&["p", "kind"])?;
                let kind = match kind_of(&d).as_str() {
                    "cascaded_ad" => QutritKind::CascadedAd,
                    "mid_pd" => QutritKind::MidPd,
                    "composite" => QutritKind::Composite,
                    k => return Err(Error::Parse(format!("'{s}': unknown qutrit damping kind '{k}'"))),
                };
                DvNoise::Qutrit { p: d.f64_kw("p")?, kind }
            }
            "depol" => {
                d.only_keywords(&["eta"])?;
                DvNoise::Depol { eta: d.f64_kw("eta")? }
            }
            other => return Err(Error::Parse(format!("unknown DV noise '{other}'"))),
        };
        noise.validate()?;
        Ok(noise)
    }
}
