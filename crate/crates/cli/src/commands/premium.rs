//! `premium`: the extra log price change when a new price lands on a
//! 90-ending.

use std::fmt::Write as _;
use std::path::PathBuf;

use agora_core::{load_monthly, price_change_premium, PremiumFixedEffect};
use anyhow::Result;

use crate::args::PremiumFeArg;
use crate::config::{FileConfig, Settings};
use crate::report::{write_manifest, write_text};

#[derive(clap::Args, Debug)]
pub struct PremiumArgs {
    /// Monthly store-product price panel.
    #[arg(long)]
    monthly: Option<PathBuf>,
    /// Fixed effects to absorb, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    fe: Vec<PremiumFeArg>,
    /// Output directory for the report, table, and manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_FE: [PremiumFeArg; 2] = [PremiumFeArg::Year, PremiumFeArg::Month];

pub fn run(args: PremiumArgs, config: &FileConfig) -> Result<()> {
    let mut settings = Settings::new("premium", config);
    let monthly_path = settings.required_path("monthly", args.monthly)?;
    let fixed_effects = settings.list("fe", &args.fe, &DEFAULT_FE)?;
    let out = settings.out_dir(args.out)?;
    let entries = settings.finish()?;

    let panel = load_monthly(&monthly_path)?;
    let effects: Vec<PremiumFixedEffect> = fixed_effects.iter().map(|&fe| fe.into()).collect();
    let result = price_change_premium(&panel, &effects)?;

    let mut report = String::new();
    let _ = writeln!(report, "price-change premium at 90-ending landings");
    let fe_tokens: Vec<String> = fixed_effects.iter().map(|fe| fe.to_string()).collect();
    let _ = writeln!(report, "fixed effects: {}", fe_tokens.join(", "));
    let _ = writeln!(report);
    let _ = writeln!(
        report,
        "{:<12} {:>12} {:>12}",
        "term", "estimate", "std_error"
    );
    let _ = writeln!(
        report,
        "{:<12} {:>12.6} {:>12.6}",
        "ninety", result.beta_ninety, result.se_ninety
    );
    let _ = writeln!(report);
    let _ = writeln!(report, "intercept        {:.6}", result.intercept);
    let _ = writeln!(report, "price changes    {}", result.n_changes);
    let _ = writeln!(report, "demeaning sweeps {}", result.sweeps);

    let mut table = String::from("term,estimate,std_error\n");
    let _ = writeln!(
        table,
        "ninety,{:.9},{:.9}",
        result.beta_ninety, result.se_ninety
    );
    let _ = writeln!(table, "intercept,{:.9},", result.intercept);

    write_text(&out, "premium_report.txt", &report)?;
    write_text(&out, "premium_coefficients.csv", &table)?;
    write_manifest(&out, "premium", &entries)?;
    print!("{report}");
    Ok(())
}
