//! Command line front end over the scenario layer.
//!
//! Exit codes: 0 success, 1 configuration error, 2 solver failure,
//! 3 I/O error. The output directory resolves as `--out`, then the
//! `IMPACT2D_OUT_DIR` environment variable, then the config's own value.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use impact2d::diagnostics::DiagnosticsError;
use impact2d::scenario::{
    parse_config, run_scenario, sweep_scenario, RunError, ScenarioConfig, SweepParam,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "impact2d",
    version,
    about = "Dynamic frictional impact of 2D hyperelastic bodies on a rigid foundation"
)]
struct Cli {
    /// Suppress the per-run summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario; writes energy.csv, manifest.json, optional VTK frames.
    Run {
        /// Scenario config file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory override.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the scenario once per value of one parameter; writes sweep.csv.
    Sweep {
        /// Scenario config file.
        #[arg(long)]
        config: PathBuf,
        /// Root output directory override.
        #[arg(long)]
        out: Option<PathBuf>,
        /// One of: c_nu, alpha, dt, target_h, mu.
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. 1e3,1e4,1e5.
        #[arg(long)]
        values: String,
    },
    /// Parse and validate a config, reporting every violation at once.
    Validate {
        /// Scenario config file.
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out } => cmd_run(&config, out, cli.quiet),
        Command::Sweep { config, out, param, values } => {
            cmd_sweep(&config, out, &param, &values, cli.quiet)
        }
        Command::Validate { config } => cmd_validate(&config, cli.quiet),
    };
    ExitCode::from(code)
}

fn load_config(path: &Path) -> Result<ScenarioConfig, u8> {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("reading {}: {err}", path.display());
            return Err(EXIT_IO);
        }
    };
    parse_config(&text).map_err(|err| {
        eprint!("{err}");
        EXIT_CONFIG
    })
}

fn out_override(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os("IMPACT2D_OUT_DIR").map(PathBuf::from))
}

fn exit_for(err: &RunError) -> u8 {
    match err {
        RunError::Mesh(_) | RunError::SweepValue { .. } => EXIT_CONFIG,
        RunError::NonConverged { .. } | RunError::Solver(_) => EXIT_SOLVER,
        RunError::Diagnostics(DiagnosticsError::Io { .. }) | RunError::Io { .. } => EXIT_IO,
        RunError::Diagnostics(_) => EXIT_SOLVER,
    }
}

fn cmd_run(config_path: &Path, out: Option<PathBuf>, quiet: bool) -> u8 {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let out = out_override(out);
    match run_scenario(&config, out.as_deref()) {
        Ok(summary) => {
            if !quiet {
                println!(
                    "completed {} steps into {} (max penetration {:.6e}, energy drift {:.6e}, {} outer iterations)",
                    summary.steps_completed,
                    summary.directory.display(),
                    summary.max_penetration,
                    summary.final_energy_drift,
                    summary.total_outer_iterations,
                );
            }
            0
        }
        Err(err) => {
            eprintln!("{err}");
            exit_for(&err)
        }
    }
}

fn cmd_sweep(
    config_path: &Path,
    out: Option<PathBuf>,
    param: &str,
    values: &str,
    quiet: bool,
) -> u8 {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let param: SweepParam = match param.parse() {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_CONFIG;
        }
    };
    let values: Vec<f64> = match values
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(v) if !v.is_empty() => v,
        Ok(_) => {
            eprintln!("--values must list at least one number");
            return EXIT_CONFIG;
        }
        Err(err) => {
            eprintln!("--values: {err}");
            return EXIT_CONFIG;
        }
    };
    let root = out_override(out).unwrap_or_else(|| config.output.directory.clone());
    match sweep_scenario(&config, param, &values, &root) {
        Ok(rows) => {
            if !quiet {
                println!("{}", root.join("sweep.csv").display());
                println!("value,max_penetration,final_energy_drift,total_outer_iterations");
                for row in rows {
                    println!(
                        "{},{:.6e},{:.6e},{}",
                        row.value,
                        row.max_penetration,
                        row.final_energy_drift,
                        row.total_outer_iterations
                    );
                }
            }
            0
        }
        Err(err) => {
            eprintln!("{err}");
            exit_for(&err)
        }
    }
}

fn cmd_validate(config_path: &Path, quiet: bool) -> u8 {
    match load_config(config_path) {
        Ok(_) => {
            if !quiet {
                println!("{}: valid", config_path.display());
            }
            0
        }
        Err(code) => code,
    }
}
