//! `estimate`: demand regression with regulated-ending dummies and
//! absorbed fixed effects.

use std::fmt::Write as _;
use std::path::PathBuf;

use agora_core::{
    assign_dummies, estimate_demand, filter_durable_prices, load_panel, Money, RegressionResult,
    SampleRestrictions,
};
use anyhow::Result;

use crate::args::{FeArg, RestrictionArg};
use crate::config::{FileConfig, Settings};
use crate::report::{write_manifest, write_text};

#[derive(clap::Args, Debug)]
pub struct EstimateArgs {
    /// Weekly store-product panel.
    #[arg(long)]
    panel: Option<PathBuf>,
    /// Keep records priced strictly below this many agorot.
    #[arg(long)]
    price_cap_agorot: Option<i64>,
    /// Year whose modal prices define the indicator baseline.
    #[arg(long)]
    base_year: Option<i32>,
    /// Year whose regulated endings are flagged.
    #[arg(long)]
    post_year: Option<i32>,
    /// Pair qualification rule for the estimation sample.
    #[arg(long, value_enum)]
    restriction: Option<RestrictionArg>,
    /// Fixed effects to absorb, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    fe: Vec<FeArg>,
    /// Keep only prices held for at least this many consecutive weeks.
    #[arg(long)]
    min_weeks: Option<u32>,
    /// Keep records with year strictly below this cutoff.
    #[arg(long)]
    cutoff_year: Option<i32>,
    /// Drop the base-year modal-price indicator from the regression.
    #[arg(long)]
    drop_d99: bool,
    /// Output directory for the report, tables, and manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_FE: [FeArg; 4] = [
    FeArg::ProductStore,
    FeArg::CatYear,
    FeArg::CatMonth,
    FeArg::Chain,
];

fn push_term(report: &mut String, term: &str, estimate: f64, se: f64) {
    let _ = writeln!(report, "{term:<12} {estimate:>12.6} {se:>12.6}");
}

fn render_theta(result: &RegressionResult) -> String {
    match result.theta_hat {
        Some(theta) => format!("{theta:.6}"),
        None => String::from("undefined"),
    }
}

pub fn run(args: EstimateArgs, config: &FileConfig) -> Result<()> {
    let mut settings = Settings::new("estimate", config);
    let panel_path = settings.required_path("panel", args.panel)?;
    let cap = settings.optional("price-cap-agorot", args.price_cap_agorot)?;
    let base_year = settings.required("base-year", args.base_year)?;
    let post_year = settings.required("post-year", args.post_year)?;
    let restriction = settings.parsed(
        "restriction",
        args.restriction,
        RestrictionArg::BothEndings,
    )?;
    let fixed_effects = settings.list("fe", &args.fe, &DEFAULT_FE)?;
    let min_weeks = settings.parsed("min-weeks", args.min_weeks, 1u32)?;
    let cutoff_year = settings.optional("cutoff-year", args.cutoff_year)?;
    let drop_d99 = settings.switch("drop-d99", args.drop_d99)?;
    let out = settings.out_dir(args.out)?;
    let entries = settings.finish()?;

    let panel = load_panel(&panel_path)?;
    let working = filter_durable_prices(&panel, min_weeks);
    let assignment = assign_dummies(&working, base_year, post_year)?;
    let restrictions = SampleRestrictions {
        price_cap: cap.map(Money::from_agorot),
        restriction: restriction.into(),
        cutoff_year,
        include_d99: !drop_d99,
    };
    let effects: Vec<agora_core::FixedEffect> =
        fixed_effects.iter().map(|&fe| fe.into()).collect();
    let result = estimate_demand(&working, &assignment, &effects, &restrictions)?;

    let mut report = String::new();
    let _ = writeln!(report, "demand regression");
    let fe_tokens: Vec<String> = fixed_effects.iter().map(|fe| fe.to_string()).collect();
    let _ = writeln!(report, "fixed effects: {}", fe_tokens.join(", "));
    let _ = writeln!(report);
    let _ = writeln!(
        report,
        "{:<12} {:>12} {:>12}",
        "term", "estimate", "std_error"
    );
    push_term(&mut report, "D90", result.beta90, result.se_beta90);
    push_term(&mut report, "D00", result.beta00, result.se_beta00);
    if let (Some(beta99), Some(se_beta99)) = (result.beta99, result.se_beta99) {
        push_term(&mut report, "D99", beta99, se_beta99);
    }
    push_term(&mut report, "ln_price", result.epsilon, result.se_epsilon);
    let _ = writeln!(report);
    let _ = writeln!(report, "intercept        {:.6}", result.intercept);
    let _ = writeln!(report, "observations     {}", result.n_observations);
    let _ = writeln!(report, "mean price NIS   {:.6}", result.mean_price_nis);
    let _ = writeln!(report, "attention weight {}", render_theta(&result));
    let _ = writeln!(report, "demeaning sweeps {}", result.sweeps);

    let mut coefficients = String::from("term,estimate,std_error\n");
    let _ = writeln!(
        coefficients,
        "D90,{:.9},{:.9}",
        result.beta90, result.se_beta90
    );
    let _ = writeln!(
        coefficients,
        "D00,{:.9},{:.9}",
        result.beta00, result.se_beta00
    );
    if let (Some(beta99), Some(se_beta99)) = (result.beta99, result.se_beta99) {
        let _ = writeln!(coefficients, "D99,{beta99:.9},{se_beta99:.9}");
    }
    let _ = writeln!(
        coefficients,
        "ln_price,{:.9},{:.9}",
        result.epsilon, result.se_epsilon
    );

    let mut summary = String::from("key,value\n");
    let _ = writeln!(summary, "intercept,{:.9}", result.intercept);
    let _ = writeln!(summary, "observations,{}", result.n_observations);
    let _ = writeln!(summary, "mean_price_nis,{:.9}", result.mean_price_nis);
    let _ = writeln!(summary, "attention_weight,{}", render_theta(&result));
    let _ = writeln!(summary, "sweeps,{}", result.sweeps);

    write_text(&out, "estimate_report.txt", &report)?;
    write_text(&out, "estimate_coefficients.csv", &coefficients)?;
    write_text(&out, "estimate_summary.csv", &summary)?;
    write_manifest(&out, "estimate", &entries)?;
    print!("{report}");
    Ok(())
}
