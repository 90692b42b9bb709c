//! Batch command line for cash-rounding simulation, bias estimation,
//! and price-ending analytics.
//!
//! Every subcommand reads its inputs, writes a human report, delimited
//! machine tables, and a `manifest.txt` into `--out`, and prints the
//! report body to stdout. Report bodies depend only on the resolved
//! settings, so reruns are byte-identical; the manifest is the only
//! timestamped file.

mod args;
mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};

use crate::config::FileConfig;

#[derive(Parser, Debug)]
#[command(name = "agora", version, about = "Cash-rounding and price-ending toolkit")]
struct Args {
    /// Config file with `subcommand.key = value` lines; flags win.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate per-store rounding taxes by seeded Monte Carlo.
    Simulate(commands::simulate::SimulateArgs),
    /// Compute exact rounding taxes, optionally against a simulation.
    Oracle(commands::oracle::OracleArgs),
    /// Aggregate national totals under cash-share scenarios.
    Scenario(commands::scenario::ScenarioArgs),
    /// Run the demand regression with regulated-ending dummies.
    Estimate(commands::estimate::EstimateArgs),
    /// Generate a synthetic demand panel with planted coefficients.
    Panel(commands::panel::PanelArgs),
    /// Tabulate price endings, penny means, and the ending-drift cost.
    Analyze(commands::analyze::AnalyzeArgs),
    /// Estimate the 90-ending premium in log price changes.
    Premium(commands::premium::PremiumArgs),
}

fn run(args: Args) -> anyhow::Result<()> {
    let config = FileConfig::load(args.config.as_deref())?;
    match args.command {
        Command::Simulate(sub) => commands::simulate::run(sub, &config),
        Command::Oracle(sub) => commands::oracle::run(sub, &config),
        Command::Scenario(sub) => commands::scenario::run(sub, &config),
        Command::Estimate(sub) => commands::estimate::run(sub, &config),
        Command::Panel(sub) => commands::panel::run(sub, &config),
        Command::Analyze(sub) => commands::analyze::run(sub, &config),
        Command::Premium(sub) => commands::premium::run(sub, &config),
    }
}

fn main() {
    let args = Args::parse();
    if let Err(error) = run(args) {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}
