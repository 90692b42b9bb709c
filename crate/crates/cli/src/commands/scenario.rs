//! `scenario`: national rounding-transfer totals under uniform and
//! extreme cash-share scenarios.

use std::fmt::Write as _;
use std::path::PathBuf;

use agora_core::numeric::{format_ratio_fixed, to_big};
use agora_core::{
    extreme_scenarios, load_avg_taxes, load_profiles, total_tax, CashShareScenario, TaxTable,
};
use anyhow::{Context, Result};

use crate::config::{FileConfig, Settings};
use crate::report::{write_manifest, write_text};

#[derive(clap::Args, Debug)]
pub struct ScenarioArgs {
    /// Store profile table (transaction counts and revenue shares).
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Per-store average tax table (agorot per transaction).
    #[arg(long)]
    taxes: Option<PathBuf>,
    /// Cash share applied uniformly, and the aggregate target for the
    /// extreme scenarios, as a decimal in [0, 1].
    #[arg(long)]
    cash_share: Option<String>,
    /// Output directory for the report, table, and manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn push_table(report: &mut String, table: &TaxTable, scenario: &CashShareScenario) {
    let _ = writeln!(
        report,
        "{:<24} {:>12} {:>16} {:>10} {:>14}",
        "store", "tax_agorot", "transactions", "share", "total_nis"
    );
    for (row, share) in table.rows.iter().zip(&scenario.shares) {
        let _ = writeln!(
            report,
            "{:<24} {:>12} {:>16} {:>10} {:>14}",
            row.store_type.label(),
            format_ratio_fixed(&row.tax_agorot, 6),
            row.annual_transactions,
            format_ratio_fixed(&share.share, 6),
            row.total_nis_whole()
        );
    }
    let _ = writeln!(
        report,
        "{:<24} {:>12} {:>16} {:>10} {:>14}",
        "all", "", "", "", table.grand_total_nis_whole()
    );
}

fn push_csv_rows(table: &mut String, label: &str, tax_table: &TaxTable, scenario: &CashShareScenario) {
    for (row, share) in tax_table.rows.iter().zip(&scenario.shares) {
        let _ = writeln!(
            table,
            "{label},{},{},{},{},{}",
            row.store_type.as_str(),
            format_ratio_fixed(&row.tax_agorot, 6),
            row.annual_transactions,
            format_ratio_fixed(&share.share, 6),
            row.total_nis_whole()
        );
    }
    let _ = writeln!(
        table,
        "{label},all,,,,{}",
        tax_table.grand_total_nis_whole()
    );
}

pub fn run(args: ScenarioArgs, config: &FileConfig) -> Result<()> {
    let mut settings = Settings::new("scenario", config);
    let profiles_path = settings.required_path("profiles", args.profiles)?;
    let taxes_path = settings.required_path("taxes", args.taxes)?;
    let share_text = settings.parsed("cash-share", args.cash_share, String::from("0.25"))?;
    let out = settings.out_dir(args.out)?;
    let entries = settings.finish()?;

    let share = agora_core::parse_decimal(&share_text)
        .with_context(|| format!("cash share {share_text:?}"))?;
    let profiles = load_profiles(&profiles_path)?;
    let taxes = load_avg_taxes(&taxes_path)?;

    let uniform = CashShareScenario::uniform(&profiles, share)?;
    let uniform_table = total_tax(&profiles, &taxes, &uniform)?;
    let extremes = extreme_scenarios(&profiles, &taxes, share)?;

    let mut report = String::new();
    let _ = writeln!(report, "national rounding transfer, annual whole NIS");
    let _ = writeln!(
        report,
        "uniform cash share {} (aggregate target {})",
        format_ratio_fixed(&share, 6),
        format_ratio_fixed(&uniform.aggregate_target, 6)
    );
    let _ = writeln!(report);
    push_table(&mut report, &uniform_table, &uniform);
    let _ = writeln!(report);
    let _ = writeln!(
        report,
        "maximum-transfer shares at the same aggregate target"
    );
    push_table(&mut report, &extremes.max.1, &extremes.max.0);
    let _ = writeln!(report);
    let _ = writeln!(
        report,
        "minimum-transfer shares at the same aggregate target"
    );
    push_table(&mut report, &extremes.min.1, &extremes.min.0);
    let _ = writeln!(report);
    let spread = &extremes.max.1.grand_total_agorot - &extremes.min.1.grand_total_agorot;
    let _ = writeln!(
        report,
        "max-min spread: {} NIS",
        agora_core::numeric::big_ratio_round_half_away(
            &(spread / to_big(&agora_core::Rational::from_integer(100)))
        )
    );

    let mut table = String::from(
        "scenario,store_type,tax_agorot,annual_transactions,cash_share,total_nis\n",
    );
    push_csv_rows(&mut table, "uniform", &uniform_table, &uniform);
    push_csv_rows(&mut table, "max", &extremes.max.1, &extremes.max.0);
    push_csv_rows(&mut table, "min", &extremes.min.1, &extremes.min.0);

    write_text(&out, "scenario_report.txt", &report)?;
    write_text(&out, "scenario_table.csv", &table)?;
    write_manifest(&out, "scenario", &entries)?;
    print!("{report}");
    Ok(())
}
