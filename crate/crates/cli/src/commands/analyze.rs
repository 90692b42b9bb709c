//! `analyze`: price-ending histograms, penny means, and the annual
//! cost of settling at a higher ending after a price change.

use std::fmt::Write as _;
use std::path::PathBuf;

use agora_core::numeric::{format_ratio_fixed, format_scaled};
use agora_core::{
    avg_pennies, ending_histogram, inattention_penalty, load_observations, load_unit_volumes,
    segment_change, Money, PennyStats,
};
use anyhow::{bail, Result};

use crate::args::ModeArg;
use crate::config::{FileConfig, Settings};
use crate::report::{write_manifest, write_text};

#[derive(clap::Args, Debug)]
pub struct AnalyzeArgs {
    /// Store-level price observations.
    #[arg(long)]
    observations: Option<PathBuf>,
    /// Annual unit volumes per store type.
    #[arg(long)]
    volumes: Option<PathBuf>,
    /// Keep prices strictly below this many agorot.
    #[arg(long)]
    price_cap_agorot: Option<i64>,
    /// Analyze every observation, with no price cap.
    #[arg(long)]
    uncapped: bool,
    /// Earlier comparison year (the "before" sample).
    #[arg(long)]
    base_year: Option<i32>,
    /// Later comparison year (the "after" sample).
    #[arg(long)]
    post_year: Option<i32>,
    /// Penny-mean rounding applied before differencing.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Output directory for the report, tables, and manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn mode_digits(mode: ModeArg) -> u32 {
    match mode {
        ModeArg::OneDecimal => 1,
        ModeArg::Exact => 6,
    }
}

fn stats_for_year(stats: &[PennyStats], year: i32) -> Vec<PennyStats> {
    stats.iter().filter(|s| s.year == year).cloned().collect()
}

pub fn run(args: AnalyzeArgs, config: &FileConfig) -> Result<()> {
    let mut settings = Settings::new("analyze", config);
    let observations_path = settings.required_path("observations", args.observations)?;
    let volumes_path = settings.required_path("volumes", args.volumes)?;
    let cap_agorot = settings.optional("price-cap-agorot", args.price_cap_agorot)?;
    let uncapped = settings.switch("uncapped", args.uncapped)?;
    let base_year = settings.required("base-year", args.base_year)?;
    let post_year = settings.required("post-year", args.post_year)?;
    let mode = settings.parsed("mode", args.mode, ModeArg::OneDecimal)?;
    let out = settings.out_dir(args.out)?;
    let entries = settings.finish()?;

    let cap = match (cap_agorot, uncapped) {
        (Some(agorot), false) => Some(Money::from_agorot(agorot)),
        (None, true) => None,
        _ => bail!(
            "the price cap is never defaulted: pass --price-cap-agorot N or --uncapped"
        ),
    };

    let observations = load_observations(&observations_path)?;
    let volumes = load_unit_volumes(&volumes_path)?;
    let in_scope: Vec<_> = match cap {
        Some(cap) => observations
            .iter()
            .filter(|o| o.price < cap)
            .cloned()
            .collect(),
        None => observations.clone(),
    };

    let histograms = ending_histogram(&in_scope)?;
    let pennies = avg_pennies(&observations, cap)?;
    let after = stats_for_year(&pennies.stats, post_year);
    let before = stats_for_year(&pennies.stats, base_year);
    let penalty = inattention_penalty(&after, &before, &volumes, mode.into())?;

    let find_histogram = |store, year| {
        histograms
            .iter()
            .find(|h| h.store_type == store && h.year == year)
    };
    let mut changes: Vec<(agora_core::StoreType, [Option<agora_core::Rational>; 10])> = Vec::new();
    for row in &penalty.rows {
        if let (Some(from), Some(to)) = (
            find_histogram(row.store_type, base_year),
            find_histogram(row.store_type, post_year),
        ) {
            changes.push((row.store_type, segment_change(from, to)?));
        }
    }

    let digits = mode_digits(mode);
    let cap_label = match cap {
        Some(cap) => format!("prices below {cap} NIS"),
        None => String::from("all prices"),
    };

    let mut report = String::new();
    let _ = writeln!(report, "price-ending analytics, {cap_label}");
    let _ = writeln!(report);
    let _ = writeln!(report, "mean pennies per price (agorot)");
    let _ = writeln!(
        report,
        "{:<24} {:>6} {:>10} {:>10}",
        "store", "year", "prices", "mean"
    );
    for stat in &pennies.stats {
        let _ = writeln!(
            report,
            "{:<24} {:>6} {:>10} {:>10}",
            stat.store_type.label(),
            stat.year,
            stat.n_prices,
            format_scaled(stat.mean_deci_agorot() as i128, 1)
        );
    }
    for (store, year) in &pennies.omitted {
        let warning = format!(
            "warning: no {} prices under the cap in {year}",
            store.label()
        );
        let _ = writeln!(report, "{warning}");
        eprintln!("{warning}");
    }
    let _ = writeln!(report);
    let _ = writeln!(
        report,
        "annual cost of the ending drift, {post_year} vs {base_year} (NIS)"
    );
    let _ = writeln!(
        report,
        "{:<24} {:>10} {:>10} {:>10} {:>16} {:>14}",
        "store", "after", "before", "diff", "units", "total_nis"
    );
    for row in &penalty.rows {
        let _ = writeln!(
            report,
            "{:<24} {:>10} {:>10} {:>10} {:>16} {:>14}",
            row.store_type.label(),
            format_ratio_fixed(&row.mean_after, digits),
            format_ratio_fixed(&row.mean_before, digits),
            format_ratio_fixed(&row.difference, digits),
            row.volume,
            row.total_nis
        );
    }
    let _ = writeln!(report, "grand total NIS {}", penalty.grand_total_nis);
    let _ = writeln!(report);
    let _ = writeln!(report, "ending-decade shares");
    let _ = writeln!(
        report,
        "{:<24} {:>6} {}",
        "store",
        "year",
        (0..10)
            .map(|d| format!("{:>8}", format!("{}0s", d)))
            .collect::<String>()
    );
    for histogram in &histograms {
        let shares = histogram.segment_shares();
        let rendered: String = shares
            .iter()
            .map(|s| format!("{:>8}", format_ratio_fixed(s, 4)))
            .collect();
        let _ = writeln!(
            report,
            "{:<24} {:>6} {rendered}",
            histogram.store_type.label(),
            histogram.year
        );
    }
    if !changes.is_empty() {
        let _ = writeln!(report);
        let _ = writeln!(
            report,
            "relative change in decade shares, {post_year} vs {base_year}"
        );
        for (store, change) in &changes {
            let rendered: String = change
                .iter()
                .map(|entry| match entry {
                    Some(value) => format!("{:>10}", format_ratio_fixed(value, 4)),
                    None => format!("{:>10}", "undefined"),
                })
                .collect();
            let _ = writeln!(report, "{:<24} {rendered}", store.label());
        }
    }

    let mut endings = String::from("store_type,year,residue,count,share\n");
    for histogram in &histograms {
        for (residue, count) in histogram.counts().iter().enumerate() {
            let share = histogram.share(residue as u8)?;
            let _ = writeln!(
                endings,
                "{},{},{residue},{count},{}",
                histogram.store_type.as_str(),
                histogram.year,
                format_ratio_fixed(&share, 6)
            );
        }
    }

    let mut penny_table = String::from("store_type,year,n_prices,mean_agorot\n");
    for stat in &pennies.stats {
        let _ = writeln!(
            penny_table,
            "{},{},{},{}",
            stat.store_type.as_str(),
            stat.year,
            stat.n_prices,
            format_ratio_fixed(&stat.mean(), 6)
        );
    }

    let mut penalty_table = String::from(
        "store_type,year_after,year_before,mean_after,mean_before,difference,volume,total_nis\n",
    );
    for row in &penalty.rows {
        let _ = writeln!(
            penalty_table,
            "{},{},{},{},{},{},{},{}",
            row.store_type.as_str(),
            row.year_after,
            row.year_before,
            format_ratio_fixed(&row.mean_after, digits),
            format_ratio_fixed(&row.mean_before, digits),
            format_ratio_fixed(&row.difference, digits),
            row.volume,
            row.total_nis
        );
    }
    let _ = writeln!(
        penalty_table,
        "all,{post_year},{base_year},,,,,{}",
        penalty.grand_total_nis
    );

    let mut segments = String::from("store_type,year,segment,share\n");
    for histogram in &histograms {
        for (segment, share) in histogram.segment_shares().iter().enumerate() {
            let _ = writeln!(
                segments,
                "{},{},{segment},{}",
                histogram.store_type.as_str(),
                histogram.year,
                format_ratio_fixed(share, 6)
            );
        }
    }
    for (store, change) in &changes {
        for (segment, entry) in change.iter().enumerate() {
            let rendered = match entry {
                Some(value) => format_ratio_fixed(value, 6),
                None => String::from("undefined"),
            };
            let _ = writeln!(
                segments,
                "{},change,{segment},{rendered}",
                store.as_str()
            );
        }
    }

    let penny_series = {
        let mut series = String::from("store_type,year,mean_agorot\n");
        for stat in &pennies.stats {
            let _ = writeln!(
                series,
                "{},{},{}",
                stat.store_type.as_str(),
                stat.year,
                format_scaled(stat.mean_deci_agorot() as i128, 1)
            );
        }
        series
    };
    let nineties_series = {
        let mut series = String::from("store_type,year,share_90_to_99\n");
        for histogram in &histograms {
            let share = histogram.share_in_range(90, 99)?;
            let _ = writeln!(
                series,
                "{},{},{}",
                histogram.store_type.as_str(),
                histogram.year,
                format_ratio_fixed(&share, 6)
            );
        }
        series
    };

    write_text(&out, "analyze_report.txt", &report)?;
    write_text(&out, "analyze_endings.csv", &endings)?;
    write_text(&out, "analyze_pennies.csv", &penny_table)?;
    write_text(&out, "analyze_penalty.csv", &penalty_table)?;
    write_text(&out, "analyze_segments.csv", &segments)?;
    write_text(&out, "analyze_penny_series.csv", &penny_series)?;
    write_text(&out, "analyze_nineties_series.csv", &nineties_series)?;
    write_manifest(&out, "analyze", &entries)?;
    print!("{report}");
    Ok(())
}
