use std::path::PathBuf;
use std::process::ExitCode;

use bosupp_cli::sweep::Overrides;
use bosupp_cli::{figures, run_config, RunSummary, EXIT_CONFIG, EXIT_TOLERANCE};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bosupp", version, about = "Noise-suppression sweeps for bosonic codes")]
struct Cli {
    /// Fock dimension, overriding the config.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Guard band width, overriding the config.
    #[arg(long, global = true)]
    guard: Option<usize>,
    /// RNG seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the sweep (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one sweep config.
    Run {
        config: PathBuf,
        /// Directory that relative output paths are resolved against.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Regenerate the data behind a figure from the bundled configs.
    Figure {
        /// One of fig3..fig10c, or `list`.
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the numerical acceptance checks.
    Selftest,
}

fn report(name: &str, s: &RunSummary) -> u8 {
    for r in &s.rows {
        for f in &r.tolerance_failures {
            eprintln!("{name}: {}={}: {f}", r.row.sweep_param, r.row.sweep_value);
        }
        if let Some((kind, msg)) = &r.fault {
            eprintln!("{name}: {}={}: {kind:?}: {msg}", r.row.sweep_param, r.row.sweep_value);
        }
    }
    println!("{name}: {} rows -> {}", s.rows.len(), s.path.display());
    s.exit_code()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let overrides = Overrides {
        dim: cli.dim,
        guard: cli.guard,
        seed: cli.seed,
    };
    let code = match cli.command {
        Command::Run { config, out } => match std::fs::read_to_string(&config) {
            Err(e) => {
                eprintln!("error: {}: {e}", config.display());
                EXIT_CONFIG
            }
            Ok(text) => match run_config(&text, overrides, &out) {
                Ok(s) => report(&config.display().to_string(), &s),
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    e.code
                }
            },
        },
        Command::Figure { name, out } if name == "list" => {
            let _ = out;
            for n in figures::names() {
                println!("{n}");
            }
            0
        }
        Command::Figure { name, out } => match figures::configs(&name) {
            None => {
                let known: Vec<_> = figures::names().collect();
                eprintln!("error: unknown figure {name:?}; known: {}", known.join(", "));
                EXIT_CONFIG
            }
            Some(confs) => {
                let mut worst = 0;
                for (cname, text) in confs {
                    let c = match run_config(text, overrides, &out) {
                        Ok(s) => report(cname, &s),
                        Err(e) => {
                            eprintln!("error: {cname}: {e}");
                            e.code
                        }
                    };
                    worst = merge(worst, c);
                }
                worst
            }
        },
        Command::Selftest => {
            let mut failed = false;
            for c in bosupp::selftest::run_all() {
                println!("{c}");
                failed |= !c.passed;
            }
            if failed {
                EXIT_TOLERANCE
            } else {
                0
            }
        }
    };
    ExitCode::from(code)
}

/// Combines exit codes across several configs; 3 outranks 4, which outranks 2.
fn merge(a: u8, b: u8) -> u8 {
    let rank = |c: u8| match c {
        0 => 0,
        EXIT_CONFIG => 1,
        4 => 2,
        _ => 3,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}
