use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::descriptor::Descriptor;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Channel only, no suppression.
    None,
    /// Controlled-Fourier interferometer with `K` qubit ancillas.
    Cf,
    /// `[PQP-condrot]^L` benchmark with one qubit ancilla.
    Pqp,
    Qutrit,
    /// Remote version with a preshared Bell pair.
    Comm,
    /// Gate-count cost model of the bypass scheme.
    Bypass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Herald {
    /// Every ancilla back in its initial state.
    Initial,
    Comm00,
    Comm00And11,
    /// Qutrit level `j`.
    Level(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FirstGate {
    Conditional,
    /// Local qumode rotation `e^{iθ₁a†a}` in place of the first conditional
    /// gate (like-even codes).
    LocalRotation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AncillaInit {
    Ground,
    /// `n̂·σ|0⟩` (like-odd codes).
    AxisFlipped,
}

/// Extra noise after every entangling gate: loss on the mode and composite
/// damping on the ancilla the gate touched.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateNoise {
    pub loss: f64,
    pub damping: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSpec {
    pub variant: Variant,
    /// Number of qubit ancillas for [`Variant::Cf`].
    pub k: usize,
    pub thetas: Vec<f64>,
    pub axis: [f64; 3],
    /// PQP layer count.
    pub layers: usize,
    pub herald: Herald,
    pub first_gate: FirstGate,
    pub ancilla_init: AncillaInit,
    /// Resolve the first gate and ancilla state from the code's parity.
    pub shortcut: bool,
    pub gate_noise: Option<GateNoise>,
}

pub const X_AXIS: [f64; 3] = [1.0, 0.0, 0.0];

/// `θ_j = π/2^j`, `j = 1..K`.
pub fn default_thetas(k: usize) -> Vec<f64> {
    (1..=k).map(|j| PI / 2f64.powi(j as i32)).collect()
}

impl ProtocolSpec {
    fn base(variant: Variant) -> Self {
        Self {
            variant,
            k: 0,
            thetas: Vec::new(),
            axis: X_AXIS,
            layers: 0,
            herald: Herald::Initial,
            first_gate: FirstGate::Conditional,
            ancilla_init: AncillaInit::Ground,
            shortcut: false,
            gate_noise: None,
        }
    }

    pub fn none() -> Self {
        Self::base(Variant::None)
    }

    pub fn cf(k: usize) -> Self {
        Self {
            k,
            thetas: default_thetas(k),
            ..Self::base(Variant::Cf)
        }
    }

    pub fn pqp(layers: usize) -> Self {
        Self {
            k: 1,
            thetas: default_thetas(1),
            layers,
            ..Self::base(Variant::Pqp)
        }
    }

    pub fn qutrit(j: usize) -> Self {
        Self {
            herald: Herald::Level(j),
            ..Self::base(Variant::Qutrit)
        }
    }

    pub fn comm(both: bool) -> Self {
        Self {
            k: 1,
            thetas: default_thetas(1),
            herald: if both { Herald::Comm00And11 } else { Herald::Comm00 },
            ..Self::base(Variant::Comm)
        }
    }

    pub fn bypass() -> Self {
        Self {
            k: 2,
            thetas: default_thetas(2),
            gate_noise: Some(GateNoise { loss: 0.01, damping: 0.01 }),
            ..Self::base(Variant::Bypass)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let norm: f64 = self.axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("rotation axis has norm {norm}")));
        }
        if self.variant == Variant::Cf {
            if self.k == 0 {
                return Err(Error::Parameter("cf needs K >= 1".into()));
            }
            if self.thetas.len() != self.k {
                return Err(Error::Parameter(format!("{} angles for K={}", self.thetas.len(), self.k)));
            }
        }
        if let Herald::Level(j) = self.herald {
            if j > 2 {
                return Err(Error::Parameter(format!("qutrit herald level {j}")));
            }
        }
        if let Some(g) = self.gate_noise {
            if !(0.0..1.0).contains(&g.loss) || !(0.0..=1.0).contains(&g.damping) {
                return Err(Error::Parameter("gate noise strengths out of range".into()));
            }
        }
        if self.thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("rotation angle".into()));
        }
        Ok(())
    }
}

impl fmt::Display for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.variant {
            Variant::None => write!(f, "none")?,
            Variant::Cf => {
                write!(f, "cf(K={}", self.k)?;
                if self.thetas != default_thetas(self.k) {
                    write!(f, ",theta={}", self.thetas[0])?;
                }
                if self.shortcut {
                    write!(f, ",shortcut=true")?;
                }
                if let Some(g) = self.gate_noise {
                    write!(f, ",gate_loss={},gate_p={}", g.loss, g.damping)?;
                }
                write!(f, ")")?
            }
            Variant::Pqp => write!(f, "pqp(L={})", self.layers)?,
            Variant::Qutrit => {
                let j = if let Herald::Level(j) = self.herald { j } else { 0 };
                write!(f, "qutrit(herald={j})")?
            }
            Variant::Comm => {
                let h = if self.herald == Herald::Comm00And11 { "00_11" } else { "00" };
                write!(f, "comm(herald={h})")?
            }
            Variant::Bypass => {
                let g = self.gate_noise.unwrap_or(GateNoise { loss: 0.0, damping: 0.0 });
                write!(f, "bypass(gate_loss={},gate_p={})", g.loss, g.damping)?
            }
        }
        Ok(())
    }
}

fn gate_noise(d: &Descriptor, default: Option<GateNoise>) -> Result<Option<GateNoise>> {
    let loss = d.keyword("gate_loss").is_some();
    let p = d.keyword("gate_p").is_some();
    if !loss && !p {
        return Ok(default);
    }
    let base = default.unwrap_or(GateNoise { loss: 0.0, damping: 0.0 });
    Ok(Some(GateNoise {
        loss: if loss { d.f64_kw("gate_loss")? } else { base.loss },
        damping: if p { d.f64_kw("gate_p")? } else { base.damping },
    }))
}

impl FromStr for ProtocolSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let d = Descriptor::parse(s)?;
        let spec = match d.name.as_str() {
            "none" => {
                d.expect_arity(0)?;
                ProtocolSpec::none()
            }
            "cf" => {
                d.only_keywords(&["K", "theta", "shortcut", "gate_loss", "gate_p"])?;
                let k = if d.keyword("K").is_some() { d.usize_kw("K")? } else { 1 };
                let mut spec = ProtocolSpec::cf(k);
                if d.keyword("theta").is_some() {
                    if k != 1 {
                        return Err(Error::Parse(format!("'{s}': theta= only applies to K=1")));
                    }
                    spec.thetas = vec![d.f64_kw("theta")?];
                }
                spec.shortcut = match d.keyword("shortcut") {
                    None | Some("false") => false,
                    Some("true") => true,
                    Some(v) => return Err(Error::Parse(format!("'{s}': shortcut='{v}'"))),
                };
                spec.gate_noise = gate_noise(&d, None)?;
                spec
            }
            "pqp" => {
                d.only_keywords(&["L"])?;
                ProtocolSpec::pqp(d.usize_kw("L")?)
            }
            "qutrit" => {
                d.only_keywords(&["herald"])?;
                let j = if d.keyword("herald").is_some() { d.usize_kw("herald")? } else { 0 };
                ProtocolSpec::qutrit(j)
            }
            "comm" => {
                d.only_keywords(&["herald"])?;
                match d.keyword("herald").unwrap_or("00") {
                    "00" => ProtocolSpec::comm(false),
                    "00_11" | "both" => ProtocolSpec::comm(true),
                    h => return Err(Error::Parse(format!("'{s}': unknown herald '{h}'"))),
                }
            }
            "bypass" => {
                d.only_keywords(&["gate_loss", "gate_p"])?;
                let mut spec = ProtocolSpec::bypass();
                spec.gate_noise = gate_noise(&d, spec.gate_noise)?;
                spec
            }
            other => return Err(Error::Parse(format!("unknown protocol '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}
