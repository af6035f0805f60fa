use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cournot_cli::{parse_scenario, run_scenario, RunOptions, EXIT_CONFIG};

/// Verification runner for typicality, practical certainty, and governance
/// checks on finite product sample spaces.
#[derive(Parser)]
#[command(name = "cournot", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every task in a scenario file and write reports.
    Run {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory for reports (overrides the scenario's own).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stop at the first task that is not clean.
        #[arg(long)]
        fail_fast: bool,
        /// Replace every experiment seed.
        #[arg(long)]
        seed_override: Option<u64>,
        /// Override the bisection tolerance for measure tasks.
        #[arg(long)]
        tol: Option<f64>,
        /// Override the finite-horizon depth for measure tasks.
        #[arg(long)]
        horizon: Option<u64>,
        /// Evaluate independent event batches in parallel.
        #[arg(long)]
        parallel: bool,
    },
    /// Parse and validate a scenario file without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            scenario,
            out,
            fail_fast,
            seed_override,
            tol,
            horizon,
            parallel,
        } => {
            let name = scenario
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into());
            let text = match std::fs::read_to_string(&scenario) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", scenario.display());
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            };
            let parsed = match parse_scenario(&text) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            };
            let options = RunOptions {
                out_dir: out,
                fail_fast,
                seed_override,
                tol_override: tol,
                horizon_override: horizon,
                parallel,
            };
            match run_scenario(&parsed, &name, &options) {
                Ok(summary) => {
                    for task in &summary.tasks {
                        let name = task.name.as_deref().unwrap_or("");
                        println!(
                            "task {:02} {:<9} {:<10} {}",
                            task.index,
                            task.task,
                            format!("{:?}", task.status).to_lowercase(),
                            name
                        );
                        if let Some(detail) = &task.detail {
                            eprintln!("  {detail}");
                        }
                    }
                    summary.exit_code
                }
                Err(e) => {
                    eprintln!("{e}");
                    EXIT_CONFIG
                }
            }
        }
        Command::Validate { scenario } => {
            let text = match std::fs::read_to_string(&scenario) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", scenario.display());
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            };
            match parse_scenario(&text) {
                Ok(s) => {
                    println!(
                        "ok: {} measures, {} experiments, {} tasks",
                        s.measures.len(),
                        s.experiments.len(),
                        s.tasks.len()
                    );
                    0
                }
                Err(e) => {
                    eprintln!("{e}");
                    EXIT_CONFIG
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
