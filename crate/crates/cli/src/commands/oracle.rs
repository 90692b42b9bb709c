//! `oracle`: exact per-transaction rounding tax by modular convolution,
//! optionally compared against a Monte Carlo run.

use std::fmt::Write as _;
use std::path::PathBuf;

use agora_core::numeric::{format_big_ratio_fixed, format_scaled, to_big};
use agora_core::{
    exact_rounding_tax, load_profiles, simulate_rounding_tax_with_workers, SimulationConfig,
};
use anyhow::Result;
use num::ToPrimitive;

use crate::args::RegimeArg;
use crate::config::{FileConfig, Settings};
use crate::report::{write_manifest, write_text};

#[derive(clap::Args, Debug)]
pub struct OracleArgs {
    /// Store profile table (ending and basket-size distributions).
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Cash rounding regime.
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// When set, also simulate this many transactions per store and
    /// report the gap between the sample mean and the exact value.
    #[arg(long)]
    n: Option<u64>,
    /// Base seed for the comparison run.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the comparison run.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for the report, table, and manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: OracleArgs, config: &FileConfig) -> Result<()> {
    let mut settings = Settings::new("oracle", config);
    let profiles_path = settings.required_path("profiles", args.profiles)?;
    let regime = settings.parsed("regime", args.regime, RegimeArg::Nearest10)?;
    let n = settings.optional("n", args.n)?;
    let seed = settings.parsed("seed", args.seed, 42u64)?;
    let workers = settings.parsed("workers", args.workers, 1usize)?;
    let out = settings.out_dir(args.out)?;
    let entries = settings.finish()?;

    let profiles = load_profiles(&profiles_path)?;
    let mut rows = Vec::with_capacity(profiles.len());
    for profile in &profiles {
        let exact = exact_rounding_tax(profile, regime.into())?;
        let simulated = match n {
            Some(n_transactions) => {
                let sim_config = SimulationConfig {
                    n_transactions,
                    seed,
                    regime: regime.into(),
                };
                Some(simulate_rounding_tax_with_workers(
                    profile, &sim_config, workers,
                )?)
            }
            None => None,
        };
        rows.push((profile.store_type, exact, simulated));
    }

    let mut report = String::new();
    let _ = writeln!(report, "exact rounding tax, regime {regime}");
    let _ = writeln!(report);
    match n {
        Some(n_transactions) => {
            let _ = writeln!(
                report,
                "compared against {n_transactions} simulated transactions per store, seed {seed}"
            );
            let _ = writeln!(
                report,
                "{:<24} {:>14} {:>14} {:>14} {:>12}",
                "store", "exact_agorot", "simulated", "difference", "diff_over_se"
            );
            for (store, exact, simulated) in &rows {
                let estimate = simulated.as_ref().expect("comparison run requested");
                let difference = to_big(&estimate.mean_exact) - exact;
                let ratio = difference
                    .to_f64()
                    .map(|d| d / estimate.std_error_agorot)
                    .unwrap_or(f64::NAN);
                let _ = writeln!(
                    report,
                    "{:<24} {:>14} {:>14} {:>14} {:>12.4}",
                    store.label(),
                    format_big_ratio_fixed(exact, 9),
                    format_scaled(estimate.mean_micro_agorot as i128, 6),
                    format_big_ratio_fixed(&difference, 9),
                    ratio
                );
            }
        }
        None => {
            let _ = writeln!(report, "{:<24} {:>14}", "store", "exact_agorot");
            for (store, exact, _) in &rows {
                let _ = writeln!(
                    report,
                    "{:<24} {:>14}",
                    store.label(),
                    format_big_ratio_fixed(exact, 9)
                );
            }
        }
    }

    let mut table = String::new();
    match n {
        Some(_) => {
            table.push_str("store_type,regime,exact_agorot,simulated_agorot,difference,diff_over_se\n");
            for (store, exact, simulated) in &rows {
                let estimate = simulated.as_ref().expect("comparison run requested");
                let difference = to_big(&estimate.mean_exact) - exact;
                let ratio = difference
                    .to_f64()
                    .map(|d| d / estimate.std_error_agorot)
                    .unwrap_or(f64::NAN);
                let _ = writeln!(
                    table,
                    "{},{regime},{},{},{},{:.9}",
                    store.as_str(),
                    format_big_ratio_fixed(exact, 9),
                    format_scaled(estimate.mean_micro_agorot as i128, 6),
                    format_big_ratio_fixed(&difference, 9),
                    ratio
                );
            }
        }
        None => {
            table.push_str("store_type,regime,exact_agorot\n");
            for (store, exact, _) in &rows {
                let _ = writeln!(
                    table,
                    "{},{regime},{}",
                    store.as_str(),
                    format_big_ratio_fixed(exact, 9)
                );
            }
        }
    }

    write_text(&out, "oracle_report.txt", &report)?;
    write_text(&out, "oracle_values.csv", &table)?;
    write_manifest(&out, "oracle", &entries)?;
    print!("{report}");
    Ok(())
}
