//! Config-driven sweeps over the bosupp simulator, writing CSV or JSON rows
//! with a metadata sidecar.

pub mod config;
pub mod figures;
pub mod output;
pub mod sweep;

use std::path::{Path, PathBuf};

use config::ExperimentConfig;
use sweep::{Experiment, Overrides, RowFault, RowOutcome, SetupError};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_TOLERANCE: u8 = 3;
pub const EXIT_LEAKAGE: u8 = 4;

#[derive(Debug)]
pub struct RunError {
    pub code: u8,
    pub message: String,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for RunError {}

/// Result of one completed config: where the rows went and the rows themselves.
pub struct RunSummary {
    pub path: PathBuf,
    pub rows: Vec<RowOutcome>,
}

impl RunSummary {
    /// 0 when every row is clean. Tolerance failures outrank truncation faults.
    pub fn exit_code(&self) -> u8 {
        if self.rows.iter().any(|r| !r.tolerance_failures.is_empty()) {
            EXIT_TOLERANCE
        } else if self.rows.iter().any(|r| {
            matches!(r.fault, Some((RowFault::Leakage | RowFault::Starvation, _)))
        }) {
            EXIT_LEAKAGE
        } else if self.rows.iter().any(|r| r.fault.is_some()) {
            EXIT_TOLERANCE
        } else {
            0
        }
    }
}

/// Parses `text`, runs the sweep and writes the rows plus sidecar under `out_dir`.
pub fn run_config(text: &str, overrides: Overrides, out_dir: &Path) -> Result<RunSummary, RunError> {
    let config = ExperimentConfig::parse(text).map_err(|e| RunError {
        code: EXIT_CONFIG,
        message: e.to_string(),
    })?;
    let exp = Experiment::new(config, overrides).map_err(|e| RunError {
        code: match e {
            SetupError::Config(_) => EXIT_CONFIG,
            SetupError::Truncation(_) => EXIT_LEAKAGE,
        },
        message: e.to_string(),
    })?;
    let rows = exp.run();
    let path = out_dir.join(&exp.config.output);
    let io_err = |e: std::io::Error| RunError {
        code: EXIT_CONFIG,
        message: format!("{}: {e}", path.display()),
    };
    output::write_rows(&path, exp.config.format, &rows).map_err(io_err)?;
    output::write_metadata(&path, &output::metadata(&exp, &rows)).map_err(io_err)?;
    Ok(RunSummary { path, rows })
}
