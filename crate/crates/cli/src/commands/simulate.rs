//! `simulate`: per-store rounding-tax estimates by seeded Monte Carlo.

use std::fmt::Write as _;
use std::path::PathBuf;

use agora_core::numeric::format_scaled;
use agora_core::{load_profiles, simulate_rounding_tax_with_workers, SimulationConfig};
use anyhow::Result;

use crate::args::RegimeArg;
use crate::config::{FileConfig, Settings};
use crate::report::{write_manifest, write_text};

#[derive(clap::Args, Debug)]
pub struct SimulateArgs {
    /// Store profile table (ending and basket-size distributions).
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Cash rounding regime.
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Transactions to simulate per store.
    #[arg(long)]
    n: Option<u64>,
    /// Base seed; every transaction draws from its own substream.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; estimates are identical for every value.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for the report, table, and manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: SimulateArgs, config: &FileConfig) -> Result<()> {
    let mut settings = Settings::new("simulate", config);
    let profiles_path = settings.required_path("profiles", args.profiles)?;
    let regime = settings.parsed("regime", args.regime, RegimeArg::Nearest10)?;
    let n = settings.parsed("n", args.n, 10_000u64)?;
    let seed = settings.parsed("seed", args.seed, 42u64)?;
    let workers = settings.parsed("workers", args.workers, 1usize)?;
    let out = settings.out_dir(args.out)?;
    let entries = settings.finish()?;

    let profiles = load_profiles(&profiles_path)?;
    let sim_config = SimulationConfig {
        n_transactions: n,
        seed,
        regime: regime.into(),
    };
    let mut estimates = Vec::with_capacity(profiles.len());
    for profile in &profiles {
        let estimate = simulate_rounding_tax_with_workers(profile, &sim_config, workers)?;
        estimates.push((profile.store_type, estimate));
    }

    let mut report = String::new();
    let _ = writeln!(report, "rounding-tax simulation");
    let _ = writeln!(
        report,
        "regime {regime}, {n} transactions per store, seed {seed}"
    );
    let _ = writeln!(report);
    let _ = writeln!(
        report,
        "{:<24} {:>12} {:>12}",
        "store", "mean_agorot", "std_error"
    );
    for (store, estimate) in &estimates {
        let _ = writeln!(
            report,
            "{:<24} {:>12} {:>12.6}",
            store.label(),
            format_scaled(estimate.mean_micro_agorot as i128, 6),
            estimate.std_error_agorot
        );
    }

    let mut table = String::from("store_type,regime,n_transactions,mean_agorot,std_error\n");
    for (store, estimate) in &estimates {
        let _ = writeln!(
            table,
            "{},{regime},{},{},{:.9}",
            store.as_str(),
            estimate.n_transactions,
            format_scaled(estimate.mean_micro_agorot as i128, 6),
            estimate.std_error_agorot
        );
    }

    write_text(&out, "simulate_report.txt", &report)?;
    write_text(&out, "simulate_estimates.csv", &table)?;
    write_manifest(&out, "simulate", &entries)?;
    print!("{report}");
    Ok(())
}
