//! CSV/JSON result files and their metadata sidecars.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::OutputFormat;
use crate::sweep::{Experiment, RowOutcome};

/// Bumped whenever the column set changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "sweep_param,sweep_value,f_supp,f_unsupp,p_succ,f_closed,p_closed,leakage";

/// `results.csv` → `results.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

pub fn write_rows(path: &Path, format: OutputFormat, rows: &[RowOutcome]) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            if rows.is_empty() {
                w.write_record(CSV_HEADER.split(','))?;
            }
            for r in rows {
                w.serialize(&r.row)?;
            }
            w.flush()
        }
        OutputFormat::Json => {
            let rows: Vec<_> = rows.iter().map(|r| &r.row).collect();
            let mut text = serde_json::to_string_pretty(&rows).map_err(io::Error::other)?;
            text.push('\n');
            fs::write(path, text)
        }
    }
}

/// Descriptors, truncation, seed and per-row diagnostics. No timestamps, so
/// reruns reproduce the file byte for byte.
pub fn metadata(exp: &Experiment, rows: &[RowOutcome]) -> Value {
    let cfg = &exp.config;
    let faults: Vec<Value> = rows
        .iter()
        .filter_map(|r| {
            r.fault.as_ref().map(|(kind, msg)| {
                json!({"sweep_param": r.row.sweep_param, "sweep_value": r.row.sweep_value, "kind": format!("{kind:?}"), "message": msg})
            })
        })
        .collect();
    let tolerance: Vec<Value> = rows
        .iter()
        .filter(|r| !r.tolerance_failures.is_empty())
        .map(|r| json!({"sweep_param": r.row.sweep_param, "sweep_value": r.row.sweep_value, "failures": r.tolerance_failures}))
        .collect();
    let std_errors: Vec<Value> = rows
        .iter()
        .filter_map(|r| {
            r.std_errors
                .map(|(s, u)| json!({"sweep_param": r.row.sweep_param, "sweep_value": r.row.sweep_value, "f_supp": s, "f_unsupp": u}))
        })
        .collect();
    json!({
        "name": cfg.name,
        "schema_version": SCHEMA_VERSION,
        "columns": CSV_HEADER.split(',').collect::<Vec<_>>(),
        "library_version": bosupp::VERSION,
        "cli_version": env!("CARGO_PKG_VERSION"),
        "code": cfg.code.as_ref().map(|c| c.to_string()),
        "cv_noise": cfg.cv.to_string(),
        "dv_noise": cfg.dv.to_string(),
        "protocol": cfg.scheme.to_string(),
        "reference": "none",
        "average": cfg.average.to_string(),
        "fock_dim": exp.space.dim(),
        "fock_guard": exp.space.guard(),
        "seed": exp.seed,
        "sweep": {"param": cfg.sweep.param, "values": cfg.sweep.values},
        "series": cfg.series.as_ref().map(|s| json!({"param": s.param, "values": s.values})),
        "pqp_layers": exp.pqp_params().map(|p| p.layers.iter().map(|l| json!({
            "beta_p1": l.beta_p1, "beta_q": l.beta_q, "beta_p2": l.beta_p2, "theta": l.theta
        })).collect::<Vec<_>>()),
        "optimize_at": cfg.optimize_at,
        "assumptions": cfg.assumptions,
        "faults": faults,
        "tolerance_failures": tolerance,
        "monte_carlo_std_errors": std_errors,
    })
}

pub fn write_metadata(path: &Path, meta: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(meta).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(sidecar_path(path), text)
}
