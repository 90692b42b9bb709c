//! `panel`: synthetic weekly demand panel with planted coefficients.

use std::fmt::Write as _;
use std::path::PathBuf;

use agora_core::{
    generate_panel, save_panel, BiasParams, CoefficientPlan, Money, SyntheticPanelSpec,
};
use anyhow::{Context, Result};

use crate::args::PlanArg;
use crate::config::{FileConfig, Settings};
use crate::report::{write_manifest, write_text};

#[derive(clap::Args, Debug)]
pub struct PanelArgs {
    /// Products in the panel.
    #[arg(long)]
    products: Option<u32>,
    /// Stores in the panel.
    #[arg(long)]
    stores: Option<u32>,
    /// Weeks in the panel; the first half is the base year.
    #[arg(long)]
    weeks: Option<u32>,
    /// Candidate prices in agorot, comma separated.
    #[arg(long, value_delimiter = ',')]
    grid: Vec<i64>,
    /// How demand responds to prices and endings.
    #[arg(long, value_enum)]
    plan: Option<PlanArg>,
    /// Demand intercept.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Log-log price elasticity.
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// Demand shift at 90-ending prices (reduced plan).
    #[arg(long, allow_negative_numbers = true)]
    beta90: Option<f64>,
    /// Demand shift at 00-ending prices (reduced plan).
    #[arg(long, allow_negative_numbers = true)]
    beta00: Option<f64>,
    /// Demand shift at the base-year modal price (reduced plan).
    #[arg(long, allow_negative_numbers = true)]
    beta99: Option<f64>,
    /// Attention weight on the non-shekel digits (structural plan).
    #[arg(long)]
    bias_theta: Option<f64>,
    /// Flat perceived-agorot markdown (structural plan).
    #[arg(long)]
    bias_delta: Option<u8>,
    /// Standard deviation of log-quantity noise.
    #[arg(long)]
    noise_sd: Option<f64>,
    /// Seed for the noise substreams.
    #[arg(long)]
    seed: Option<u64>,
    /// Calendar year of the first half of the panel.
    #[arg(long)]
    base_year: Option<i32>,
    /// Calendar year of the second half of the panel.
    #[arg(long)]
    post_year: Option<i32>,
    /// Output directory for the panel, report, and manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_GRID: [i64; 3] = [999, 1299, 500];

pub fn run(args: PanelArgs, config: &FileConfig) -> Result<()> {
    let mut settings = Settings::new("panel", config);
    let products = settings.parsed("products", args.products, 20u32)?;
    let stores = settings.parsed("stores", args.stores, 10u32)?;
    let weeks = settings.parsed("weeks", args.weeks, 16u32)?;
    let grid = settings.list("grid", &args.grid, &DEFAULT_GRID)?;
    let plan_arg = settings.parsed("plan", args.plan, PlanArg::Reduced)?;
    let alpha = settings.parsed("alpha", args.alpha, 2.0f64)?;
    let epsilon = settings.parsed("epsilon", args.epsilon, -1.1f64)?;
    let beta90 = settings.parsed("beta90", args.beta90, 0.05f64)?;
    let beta00 = settings.parsed("beta00", args.beta00, 0.02f64)?;
    let beta99 = settings.parsed("beta99", args.beta99, 0.03f64)?;
    let bias_theta = settings.parsed("bias-theta", args.bias_theta, 0.25f64)?;
    let bias_delta = settings.parsed("bias-delta", args.bias_delta, 0u8)?;
    let noise_sd = settings.parsed("noise-sd", args.noise_sd, 0.1f64)?;
    let seed = settings.parsed("seed", args.seed, 20_130_501u64)?;
    let base_year = settings.parsed("base-year", args.base_year, 2013i32)?;
    let post_year = settings.parsed("post-year", args.post_year, 2014i32)?;
    let out = settings.out_dir(args.out)?;
    let entries = settings.finish()?;

    let plan = match plan_arg {
        PlanArg::Reduced => CoefficientPlan::ReducedForm {
            alpha,
            epsilon,
            beta90,
            beta00,
            beta99,
        },
        PlanArg::Structural => {
            let theta_micro = (bias_theta * 1e6).round() as u32;
            CoefficientPlan::Structural {
                alpha,
                epsilon,
                bias: BiasParams::new(theta_micro, bias_delta)?,
            }
        }
    };
    let spec = SyntheticPanelSpec {
        n_products: products,
        n_stores: stores,
        n_weeks: weeks,
        price_grid: grid.iter().copied().map(Money::from_agorot).collect(),
        plan,
        noise_sd,
        seed,
        base_year,
        post_year,
    };
    let panel = generate_panel(&spec)?;
    std::fs::create_dir_all(&out)
        .with_context(|| format!("output directory {}", out.display()))?;
    let panel_path = out.join("panel.csv");
    save_panel(&panel, &panel_path)?;

    let mut report = String::new();
    let _ = writeln!(report, "synthetic demand panel");
    let _ = writeln!(
        report,
        "{products} products x {stores} stores x {weeks} weeks, plan {plan_arg}, seed {seed}"
    );
    let _ = writeln!(report, "records          {}", panel.records.len());
    let _ = writeln!(report, "base year        {base_year}");
    let _ = writeln!(report, "post year        {post_year}");

    write_text(&out, "panel_report.txt", &report)?;
    write_manifest(&out, "panel", &entries)?;
    print!("{report}");
    Ok(())
}
