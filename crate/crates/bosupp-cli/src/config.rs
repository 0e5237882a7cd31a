//! Experiment configuration: a small `key = value` format with `[section]`
//! headers and `#` comments.
//!
//! ```text
//! [experiment]
//! name = fig4_cat4_K1
//! seed = 1
//!
//! [code]
//! code = cat(4, 2)
//!
//! [noise]
//! cv = loss(mu=0.05)
//! dv = qdamp(p=0,kind=composite)
//!
//! [protocol]
//! protocol = cf(K=1)
//!
//! [sweep]
//! param = dv.p
//! values = 0, 0.1, 0.2, 0.3
//!
//! [average]
//! mode = exact-haar
//!
//! [output]
//! path = fig4_cat4_K1.csv
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use bosupp::channels::{CvNoise, DvNoise};
use bosupp::codes::CodeSpec;
use bosupp::descriptor::Descriptor;
use bosupp::protocols::ProtocolSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    /// 1-based line, or 0 for a missing key.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AverageMode {
    ExactHaar,
    /// The six Pauli eigenstates.
    Pauli,
    MonteCarlo { samples: usize, seed: u64 },
    FixedState { c0: f64, c1_re: f64, c1_im: f64 },
}

impl fmt::Display for AverageMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AverageMode::ExactHaar => write!(f, "exact-haar"),
            AverageMode::Pauli => write!(f, "pauli"),
            AverageMode::MonteCarlo { samples, seed } => write!(f, "monte-carlo(N={samples},seed={seed})"),
            AverageMode::FixedState { c0, c1_re, c1_im } => {
                write!(f, "fixed-state(c0={c0},c1={c1_re},c1_im={c1_im})")
            }
        }
    }
}

impl std::str::FromStr for AverageMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        // Mode names are hyphenated; descriptor names are not.
        let (head, rest) = s.split_at(s.find('(').unwrap_or(s.len()));
        let d = Descriptor::parse(&format!("{}{rest}", head.replace('-', "_"))).map_err(|e| e.to_string())?;
        let mode = match d.name.as_str() {
            "exact_haar" => AverageMode::ExactHaar,
            "pauli" => AverageMode::Pauli,
            "monte_carlo" => {
                d.only_keywords(&["N", "seed"]).map_err(|e| e.to_string())?;
                let samples = if d.keyword("N").is_some() {
                    d.usize_kw("N").map_err(|e| e.to_string())?
                } else {
                    2000
                };
                let seed = match d.keyword("seed") {
                    Some(v) => v.parse().map_err(|_| format!("bad seed '{v}'"))?,
                    None => 0,
                };
                if samples < 2 {
                    return Err("monte-carlo needs at least 2 samples".into());
                }
                AverageMode::MonteCarlo { samples, seed }
            }
            "fixed_state" => {
                d.only_keywords(&["c0", "c1", "c1_im"]).map_err(|e| e.to_string())?;
                let c0 = d.f64_kw("c0").map_err(|e| e.to_string())?;
                let c1_re = d.f64_kw("c1").map_err(|e| e.to_string())?;
                let c1_im = if d.keyword("c1_im").is_some() {
                    d.f64_kw("c1_im").map_err(|e| e.to_string())?
                } else {
                    0.0
                };
                if c0 < 0.0 {
                    return Err("fixed-state takes c0 ≥ 0; put the phase on c1".into());
                }
                let norm = c0 * c0 + c1_re * c1_re + c1_im * c1_im;
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(format!("fixed-state coefficients have norm² {norm}"));
                }
                AverageMode::FixedState { c0, c1_re, c1_im }
            }
            _ => return Err(format!("unknown averaging mode '{}'", head.trim())),
        };
        Ok(mode)
    }
}

/// What the protocol line names: a simulator protocol, or the DV
/// teleportation benchmark.
#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    Protocol(ProtocolSpec),
    Teleport,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Protocol(p) => write!(f, "{p}"),
            Scheme::Teleport => write!(f, "teleport"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    /// `cv.<name>` or `dv.<name>`.
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub code: Option<CodeSpec>,
    pub dim: Option<usize>,
    pub guard: Option<usize>,
    pub cv: CvNoise,
    pub dv: DvNoise,
    pub scheme: Scheme,
    /// Sweep value at which PQP layers are optimized; defaults to the first.
    pub optimize_at: Option<f64>,
    pub sweep: SweepAxis,
    /// Optional second axis; each value gets its own block of rows.
    pub series: Option<SweepAxis>,
    pub average: AverageMode,
    pub output: PathBuf,
    pub format: OutputFormat,
    /// Free-text notes copied into the metadata sidecar.
    pub assumptions: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("experiment", &["name", "seed"]),
    ("code", &["code", "dim", "guard"]),
    ("noise", &["cv", "dv"]),
    ("protocol", &["protocol", "optimize_at"]),
    ("sweep", &["param", "values", "series"]),
    ("average", &["mode"]),
    ("output", &["path", "format"]),
    ("meta", &["assumption"]),
];

struct Entry {
    line: usize,
    value: String,
}

struct Raw {
    entries: BTreeMap<(String, String), Entry>,
    assumptions: Vec<String>,
}

impl Raw {
    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn require(&self, section: &str, key: &str) -> Result<&Entry, ConfigError> {
        self.get(section, key)
            .ok_or_else(|| err(0, format!("missing '{key}' in [{section}]")))
    }

    fn parse_with<T>(
        &self,
        section: &str,
        key: &str,
        f: impl FnOnce(&str) -> Result<T, String>,
    ) -> Result<Option<T>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => f(&e.value)
                .map(Some)
                .map_err(|m| err(e.line, format!("[{section}] {key}: {m}"))),
        }
    }
}

fn lex(text: &str) -> Result<Raw, ConfigError> {
    let mut section: Option<&'static str> = None;
    let mut entries = BTreeMap::new();
    let mut assumptions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if let Some(name) = s.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line, format!("malformed section header '{s}'")))?
                .trim();
            section = Some(
                SECTIONS
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(n, _)| *n)
                    .ok_or_else(|| err(line, format!("unknown section [{name}]")))?,
            );
            continue;
        }
        let sec = section.ok_or_else(|| err(line, "key outside of any section"))?;
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', got '{s}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let allowed = SECTIONS.iter().find(|(n, _)| *n == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(err(line, format!("unknown key '{key}' in [{sec}]")));
        }
        if value.is_empty() {
            return Err(err(line, format!("empty value for '{key}'")));
        }
        if sec == "meta" {
            assumptions.push(value.to_string());
            continue;
        }
        let slot = (sec.to_string(), key.to_string());
        if let Some(prev) = entries.get(&slot) {
            let prev: &Entry = prev;
            return Err(err(line, format!("duplicate key '{key}' (first set on line {})", prev.line)));
        }
        entries.insert(slot, Entry { line, value: value.to_string() });
    }
    Ok(Raw { entries, assumptions })
}

fn parse_values(s: &str) -> Result<Vec<f64>, String> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("'{}' is not a number", v.trim())))
        .collect::<Result<Vec<f64>, String>>()?;
    if values.is_empty() {
        return Err("empty grid".into());
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err("grid values must be finite".into());
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err("grid must be strictly increasing".into());
    }
    Ok(values)
}

fn parse_axis_name(s: &str) -> Result<String, String> {
    match s.split_once('.') {
        Some(("cv" | "dv", name)) if !name.is_empty() => Ok(s.to_string()),
        _ => Err(format!("sweep parameter '{s}' must be cv.<name> or dv.<name>")),
    }
}

fn display<T: std::str::FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw = lex(text)?;
        let name = raw.require("experiment", "name")?.value.clone();
        let seed = raw.parse_with("experiment", "seed", display::<u64>)?.unwrap_or(0);

        let scheme_entry = raw.require("protocol", "protocol")?;
        let scheme = if scheme_entry.value == "teleport" {
            Scheme::Teleport
        } else {
            Scheme::Protocol(
                display::<ProtocolSpec>(&scheme_entry.value)
                    .map_err(|m| err(scheme_entry.line, format!("[protocol] protocol: {m}")))?,
            )
        };
        let code = raw.parse_with("code", "code", display::<CodeSpec>)?;
        if code.is_none() && scheme != Scheme::Teleport {
            return Err(err(0, "missing 'code' in [code]"));
        }
        let dim = raw.parse_with("code", "dim", display::<usize>)?;
        let guard = raw.parse_with("code", "guard", display::<usize>)?;
        let cv = raw.parse_with("noise", "cv", display::<CvNoise>)?.unwrap_or(CvNoise::None);
        let dv = raw.parse_with("noise", "dv", display::<DvNoise>)?.unwrap_or(DvNoise::None);
        let optimize_at = raw.parse_with("protocol", "optimize_at", display::<f64>)?;

        let param = raw.require("sweep", "param")?;
        let sweep = SweepAxis {
            param: parse_axis_name(&param.value).map_err(|m| err(param.line, m))?,
            values: raw.parse_with("sweep", "values", parse_values)?.ok_or_else(|| err(0, "missing 'values' in [sweep]"))?,
        };
        let series = raw.parse_with("sweep", "series", |s| {
            let (p, v) = s.split_once(':').ok_or("series must read '<param>: v1, v2, …'")?;
            Ok(SweepAxis {
                param: parse_axis_name(p.trim())?,
                values: parse_values(v)?,
            })
        })?;
        if series.as_ref().is_some_and(|s| s.param == sweep.param) {
            return Err(err(raw.require("sweep", "series")?.line, "series and sweep share a parameter"));
        }
        let average = raw.parse_with("average", "mode", display::<AverageMode>)?.unwrap_or(AverageMode::ExactHaar);
        let output = PathBuf::from(&raw.require("output", "path")?.value);
        let format = raw
            .parse_with("output", "format", |s| match s {
                "csv" => Ok(OutputFormat::Csv),
                "json" => Ok(OutputFormat::Json),
                other => Err(format!("unknown format '{other}'")),
            })?
            .unwrap_or(OutputFormat::Csv);

        let cfg = Self {
            name,
            seed,
            code,
            dim,
            guard,
            cv,
            dv,
            scheme,
            optimize_at,
            sweep,
            series,
            average,
            output,
            format,
            assumptions: raw.assumptions.clone(),
        };
        cfg.check_axes(&raw)?;
        Ok(cfg)
    }

    /// Every sweep value must be accepted by the descriptor it modifies.
    fn check_axes(&self, raw: &Raw) -> Result<(), ConfigError> {
        let mut axes = vec![(&self.sweep, raw.get("sweep", "values").map_or(0, |e| e.line))];
        if let Some(s) = &self.series {
            axes.push((s, raw.get("sweep", "series").map_or(0, |e| e.line)));
        }
        for (axis, line) in axes {
            for &v in &axis.values {
                self.with_param(&axis.param, v).map_err(|m| err(line, m))?;
            }
        }
        Ok(())
    }

    /// Noise descriptors with `param` set to `value`.
    pub fn with_param(&self, param: &str, value: f64) -> Result<(CvNoise, DvNoise), String> {
        self.with_param_on(self.cv, self.dv, param, value)
    }

    pub fn with_param_on(&self, cv: CvNoise, dv: DvNoise, param: &str, value: f64) -> Result<(CvNoise, DvNoise), String> {
        let (target, name) = param.split_once('.').ok_or_else(|| format!("bad parameter '{param}'"))?;
        match target {
            "cv" => Ok((cv.with_param(name, value).map_err(|e| e.to_string())?, dv)),
            "dv" => Ok((cv, dv.with_param(name, value).map_err(|e| e.to_string())?)),
            _ => Err(format!("bad parameter '{param}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
[experiment]
name = t
seed = 3

[code]
code = bin(2, 4)

[noise]
cv = loss(mu=0.05)
dv = qdamp(p=0,kind=composite)

[protocol]
protocol = cf(K=1)

[sweep]
param = dv.p
values = 0, 0.1, 0.2

[output]
path = t.csv
";

    #[test]
    fn parses_the_base_config() {
        let c = ExperimentConfig::parse(BASE).unwrap();
        assert_eq!(c.name, "t");
        assert_eq!(c.seed, 3);
        assert_eq!(c.sweep.values, vec![0.0, 0.1, 0.2]);
        assert_eq!(c.average, AverageMode::ExactHaar);
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!(c.scheme, Scheme::Protocol(ProtocolSpec::cf(1)));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = BASE.replace("values = 0, 0.1, 0.2", "values = 0, 0.2, 0.1");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert_eq!(e.line, 17);
        assert!(e.message.contains("strictly increasing"));

        let bad = BASE.replace("cv = loss(mu=0.05)", "cv = loss(eta=0.05)");
        assert_eq!(ExperimentConfig::parse(&bad).unwrap_err().line, 9);

        let bad = BASE.replace("seed = 3", "sed = 3");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.to_string(), "line 3: unknown key 'sed' in [experiment]");

        let bad = BASE.replace("param = dv.p", "param = dv.p\nparam = cv.mu");
        assert!(ExperimentConfig::parse(&bad).unwrap_err().message.contains("duplicate"));

        // dv.p = 1.5 is out of range for the damping channel
        let bad = BASE.replace("values = 0, 0.1, 0.2", "values = 0, 1.5");
        assert_eq!(ExperimentConfig::parse(&bad).unwrap_err().line, 17);
    }

    #[test]
    fn averaging_modes() {
        assert_eq!(
            "monte-carlo(N=500,seed=4)".parse::<AverageMode>().unwrap(),
            AverageMode::MonteCarlo { samples: 500, seed: 4 }
        );
        assert_eq!(
            "monte-carlo".parse::<AverageMode>().unwrap(),
            AverageMode::MonteCarlo { samples: 2000, seed: 0 }
        );
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m: AverageMode = format!("fixed-state(c0={h},c1={h})").parse().unwrap();
        assert!(matches!(m, AverageMode::FixedState { .. }));
        assert!("fixed-state(c0=1,c1=1)".parse::<AverageMode>().is_err());
        let s = m.to_string();
        assert_eq!(s.parse::<AverageMode>().unwrap(), m);
    }

    #[test]
    fn teleport_needs_no_code() {
        let text = BASE
            .replace("code = bin(2, 4)\n", "")
            .replace("protocol = cf(K=1)", "protocol = teleport");
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.scheme, Scheme::Teleport);
        assert!(c.code.is_none());
    }

    #[test]
    fn series_axis() {
        let text = BASE.replace("values = 0, 0.1, 0.2", "values = 0, 0.1, 0.2\nseries = cv.mu: 0.01, 0.05");
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.series.unwrap().values, vec![0.01, 0.05]);
    }
}
