use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use flexbeam_cli::commands::{
    cmd_plan, cmd_simulate, cmd_sweep_actuators, cmd_verify, OutputOptions,
};
use flexbeam_cli::csvio::output_digits;
use flexbeam_cli::load_scenario;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "flexbeam",
    about = "Flatness-based deformation control of an in-domain actuated beam: \
             steady planning, feedforward synthesis, closed-loop simulation, \
             and property verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the CSV/JSON bundle.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the series truncation order.
    #[arg(long)]
    n_max: Option<usize>,
    /// Override the spectral mode count.
    #[arg(long)]
    modes: Option<usize>,
    /// Override the integrator step.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the steady plan and write the amplitude/influence tables.
    Plan(Common),
    /// Compare interpolation error and control effort across actuator counts.
    SweepActuators {
        #[command(flatten)]
        common: Common,
        /// Comma-separated actuator counts, e.g. 8,12,16.
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<usize>,
    },
    /// Run the closed-loop simulation and write the full output bundle.
    Simulate(Common),
    /// Run the property suite (regularisation convergence, series
    /// diagnostics, invertibility sweep, boundary identities).
    Verify(Common),
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let digits = output_digits();
    let common = match &cli.command {
        Command::Plan(c) | Command::Simulate(c) | Command::Verify(c) => c,
        Command::SweepActuators { common, .. } => common,
    };
    let sc = load_scenario(&common.config, common.n_max, common.modes, common.dt)?;
    let out = OutputOptions { dir: common.out.clone(), digits };
    match &cli.command {
        Command::Plan(_) => {
            let summary = cmd_plan(&sc, &out)?;
            println!(
                "plan: {} actuators, residual {:.3e}, condition {:.3e}, L1 error {:.6e}, max|alpha| {:.6e} ({:.0} ms)",
                summary.actuator_count,
                summary.residual,
                summary.condition,
                summary.l1_error,
                summary.max_amplitude,
                summary.runtime_ms
            );
            Ok(true)
        }
        Command::SweepActuators { counts, .. } => {
            let rows = cmd_sweep_actuators(&sc, counts, &out)?;
            for row in &rows {
                match (row.l1_error, row.max_amplitude) {
                    (Some(l1), Some(eff)) => println!(
                        "sweep: N = {:>3}  L1 error {:.6e}  max|alpha| {:.6e}",
                        row.actuator_count, l1, eff
                    ),
                    _ => println!("sweep: N = {:>3}  {}", row.actuator_count, row.status),
                }
            }
            Ok(rows.iter().all(|r| r.status == "ok"))
        }
        Command::Simulate(_) => {
            let summary = cmd_simulate(&sc, &out)?;
            println!(
                "simulate: {} steps, final sup|e| {:.6e}, final energy {:.6e} ({:.0} ms)",
                summary.steps, summary.final_sup_error, summary.final_energy, summary.runtime_ms
            );
            Ok(true)
        }
        Command::Verify(_) => {
            let summary = cmd_verify(&sc, &out)?;
            for p in &summary.properties {
                println!(
                    "verify: {:<32} {}  value {:.6e}  threshold {:.6e}",
                    p.name,
                    if p.pass { "pass" } else { "FAIL" },
                    p.value,
                    p.threshold
                );
            }
            Ok(summary.all_passed)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
