//! Demand-panel econometrics: price-ending dummies, durability filtering,
//! fixed-effect demand estimation, and the implied attention weight.
//!
//! The estimation design centers on store-product pairs whose base-year
//! modal price ends in 99 agorot. After a cash-rounding regime change such
//! a pair can land one agora below (a 90 ending) or one above (a 00 ending)
//! the old price; comparing demand at those two nearly identical price
//! points, net of the price level itself, identifies left-digit bias.
//! Quantities and prices enter in logs and fixed effects are absorbed by
//! the [`crate::fe`] engine.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::dist::{parse_field, DistError};
use crate::fe::{self, Column, Design, FeError, Grouping};
use crate::money::Money;

/// One store-product-week observation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PanelRecord {
    pub product_id: u64,
    pub store_id: u64,
    pub chain_id: u64,
    pub category_id: u64,
    pub week: u32,
    pub year: i32,
    /// Calendar month, 1 through 12.
    pub month: u32,
    pub price: Money,
    pub quantity: f64,
}

/// A validated demand panel.
///
/// Invariants: every quantity is finite and positive, every price is
/// positive, months lie in 1..=12, and (product, store, week) is unique.
#[derive(Clone, Debug, Default)]
pub struct DemandPanel {
    pub records: Vec<PanelRecord>,
}

/// One store-product-month price point for price-change analysis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonthlyRecord {
    pub product_id: u64,
    pub store_id: u64,
    pub chain_id: u64,
    pub category_id: u64,
    pub year: i32,
    /// Calendar month, 1 through 12.
    pub month: u32,
    pub price: Money,
}

/// A validated monthly price panel.
///
/// Invariants: every price is positive, months lie in 1..=12, and
/// (product, store, year, month) is unique.
#[derive(Clone, Debug, Default)]
pub struct MonthlyPanel {
    pub records: Vec<MonthlyRecord>,
}

/// Errors from panel validation, dummy assignment, and estimation.
#[derive(Debug, Error)]
pub enum EconError {
    #[error(transparent)]
    Data(#[from] DistError),
    #[error("record {index}: quantity {quantity} is not positive and finite")]
    QuantityOutOfRange { index: usize, quantity: f64 },
    #[error("record {index}: price {price} agorot is not positive")]
    PriceOutOfRange { index: usize, price: i64 },
    #[error("record {index}: month {month} is outside 1..=12")]
    MonthOutOfRange { index: usize, month: u32 },
    #[error("duplicate observation for product {product_id}, store {store_id}, week {week}")]
    DuplicateObservation {
        product_id: u64,
        store_id: u64,
        week: u32,
    },
    #[error("duplicate monthly price for product {product_id}, store {store_id}, {year}-{month:02}")]
    DuplicateMonthly {
        product_id: u64,
        store_id: u64,
        year: i32,
        month: u32,
    },
    #[error("base year {base_year} does not precede post year {post_year}")]
    YearOrder { base_year: i32, post_year: i32 },
    #[error("dummy assignment covers {flags} records but the panel has {records}")]
    MisalignedAssignment { records: usize, flags: usize },
    #[error("no observations survive the sample restrictions")]
    EmptySample,
    #[error(transparent)]
    Fit(#[from] FeError),
    #[error("price elasticity {epsilon} is not negative, attention weight is undefined")]
    NonNegativeElasticity { epsilon: f64 },
    #[error("cannot write {path}: {source}")]
    Write {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

impl DemandPanel {
    /// Validate and wrap a record set.
    pub fn new(records: Vec<PanelRecord>) -> Result<DemandPanel, EconError> {
        let mut seen = BTreeMap::new();
        for (index, r) in records.iter().enumerate() {
            if !(r.quantity.is_finite() && r.quantity > 0.0) {
                return Err(EconError::QuantityOutOfRange {
                    index,
                    quantity: r.quantity,
                });
            }
            if r.price.agorot() <= 0 {
                return Err(EconError::PriceOutOfRange {
                    index,
                    price: r.price.agorot(),
                });
            }
            if !(1..=12).contains(&r.month) {
                return Err(EconError::MonthOutOfRange {
                    index,
                    month: r.month,
                });
            }
            if seen.insert((r.product_id, r.store_id, r.week), ()).is_some() {
                return Err(EconError::DuplicateObservation {
                    product_id: r.product_id,
                    store_id: r.store_id,
                    week: r.week,
                });
            }
        }
        Ok(DemandPanel { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl MonthlyPanel {
    /// Validate and wrap a record set.
    pub fn new(records: Vec<MonthlyRecord>) -> Result<MonthlyPanel, EconError> {
        let mut seen = BTreeMap::new();
        for (index, r) in records.iter().enumerate() {
            if r.price.agorot() <= 0 {
                return Err(EconError::PriceOutOfRange {
                    index,
                    price: r.price.agorot(),
                });
            }
            if !(1..=12).contains(&r.month) {
                return Err(EconError::MonthOutOfRange {
                    index,
                    month: r.month,
                });
            }
            if seen
                .insert((r.product_id, r.store_id, r.year, r.month), ())
                .is_some()
            {
                return Err(EconError::DuplicateMonthly {
                    product_id: r.product_id,
                    store_id: r.store_id,
                    year: r.year,
                    month: r.month,
                });
            }
        }
        Ok(MonthlyPanel { records })
    }
}

/// Load a demand panel from CSV with header
/// `product_id,store_id,chain_id,category_id,week,year,month,price_agorot,quantity`.
pub fn load_panel(path: impl AsRef<Path>) -> Result<DemandPanel, EconError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => DistError::Io {
                path: path.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()),
            },
            _ => DistError::Csv(e),
        })?;
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(DistError::from)?;
        records.push(PanelRecord {
            product_id: parse_field(&row, 0, "product_id")?,
            store_id: parse_field(&row, 1, "store_id")?,
            chain_id: parse_field(&row, 2, "chain_id")?,
            category_id: parse_field(&row, 3, "category_id")?,
            week: parse_field(&row, 4, "week")?,
            year: parse_field(&row, 5, "year")?,
            month: parse_field(&row, 6, "month")?,
            price: Money::from_agorot(parse_field(&row, 7, "price_agorot")?),
            quantity: parse_field(&row, 8, "quantity")?,
        });
    }
    DemandPanel::new(records)
}

/// Save a demand panel as CSV in the [`load_panel`] schema. Quantities are
/// written in the shortest representation that round-trips exactly.
pub fn save_panel(panel: &DemandPanel, path: impl AsRef<Path>) -> Result<(), EconError> {
    let path = path.as_ref();
    let io_err = |e: std::io::Error| EconError::Write {
        path: path.to_path_buf(),
        source: e,
    };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
    writeln!(
        out,
        "product_id,store_id,chain_id,category_id,week,year,month,price_agorot,quantity"
    )
    .map_err(io_err)?;
    for r in &panel.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.product_id,
            r.store_id,
            r.chain_id,
            r.category_id,
            r.week,
            r.year,
            r.month,
            r.price.agorot(),
            r.quantity
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(())
}

/// Load a monthly price panel from CSV with header
/// `product_id,store_id,chain_id,category_id,year,month,price_agorot`.
pub fn load_monthly(path: impl AsRef<Path>) -> Result<MonthlyPanel, EconError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => DistError::Io {
                path: path.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()),
            },
            _ => DistError::Csv(e),
        })?;
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(DistError::from)?;
        records.push(MonthlyRecord {
            product_id: parse_field(&row, 0, "product_id")?,
            store_id: parse_field(&row, 1, "store_id")?,
            chain_id: parse_field(&row, 2, "chain_id")?,
            category_id: parse_field(&row, 3, "category_id")?,
            year: parse_field(&row, 4, "year")?,
            month: parse_field(&row, 5, "month")?,
            price: Money::from_agorot(parse_field(&row, 6, "price_agorot")?),
        });
    }
    MonthlyPanel::new(records)
}

/// Save a monthly price panel as CSV in the [`load_monthly`] schema.
pub fn save_monthly(panel: &MonthlyPanel, path: impl AsRef<Path>) -> Result<(), EconError> {
    let path = path.as_ref();
    let io_err = |e: std::io::Error| EconError::Write {
        path: path.to_path_buf(),
        source: e,
    };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
    writeln!(out, "product_id,store_id,chain_id,category_id,year,month,price_agorot").map_err(io_err)?;
    for r in &panel.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.product_id,
            r.store_id,
            r.chain_id,
            r.category_id,
            r.year,
            r.month,
            r.price.agorot()
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(())
}

/// Price-ending indicators for one record. At most one is set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DummyFlags {
    /// Base-year record at the pair's modal 99-ending price.
    pub ends_99: bool,
    /// Post-period record one agora below the modal price.
    pub ends_90: bool,
    /// Post-period record one agora above the modal price.
    pub ends_00: bool,
}

/// Per-record dummy flags plus the modal prices they derive from.
///
/// `flags` is aligned with the panel's records; `None` marks a record
/// dropped by the post-period cleaning rule.
#[derive(Clone, Debug)]
pub struct DummyAssignment {
    pub base_year: i32,
    pub post_year: i32,
    /// Modal base-year 99-ending price per (product, store) pair.
    pub modes: BTreeMap<(u64, u64), Money>,
    pub flags: Vec<Option<DummyFlags>>,
}

/// The most frequent 99-ending price a pair posted in the base year, ties
/// resolved toward the lower price. `None` when the pair posted no
/// 99-ending price that year.
pub fn find_modal_99_price(
    panel: &DemandPanel,
    product_id: u64,
    store_id: u64,
    base_year: i32,
) -> Option<Money> {
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for r in &panel.records {
        if r.product_id == product_id
            && r.store_id == store_id
            && r.year == base_year
            && r.price.agorot() % 100 == 99
        {
            *counts.entry(r.price.agorot()).or_insert(0) += 1;
        }
    }
    counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&price, _)| Money::from_agorot(price))
}

fn modal_99_prices(panel: &DemandPanel, base_year: i32) -> BTreeMap<(u64, u64), Money> {
    let mut counts: BTreeMap<(u64, u64), BTreeMap<i64, u64>> = BTreeMap::new();
    for r in &panel.records {
        if r.year == base_year && r.price.agorot() % 100 == 99 {
            *counts
                .entry((r.product_id, r.store_id))
                .or_default()
                .entry(r.price.agorot())
                .or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .map(|(pair, by_price)| {
            let price = by_price
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                .map(|(&p, _)| p)
                .expect("pair entries are only created with at least one price");
            (pair, Money::from_agorot(price))
        })
        .collect()
}

/// Assign price-ending dummies relative to each pair's base-year modal
/// 99-ending price.
///
/// Records from `post_year` onward whose price is not a multiple of
/// 10 agorot cannot be posted under the rounding regulation and are
/// dropped (flag `None`). Prices are integral agorot throughout, so the
/// companion rule against sub-agora precision can never trigger. A
/// base-year record gets `ends_99` at exactly the modal price; a
/// post-period record gets `ends_90` at one agora below it or `ends_00`
/// at one agora above it. Everything else carries all-false flags.
pub fn assign_dummies(
    panel: &DemandPanel,
    base_year: i32,
    post_year: i32,
) -> Result<DummyAssignment, EconError> {
    if base_year >= post_year {
        return Err(EconError::YearOrder {
            base_year,
            post_year,
        });
    }
    let modes = modal_99_prices(panel, base_year);
    let flags = panel
        .records
        .iter()
        .map(|r| {
            if r.year >= post_year && r.price.agorot() % 10 != 0 {
                return None;
            }
            let mut f = DummyFlags::default();
            if let Some(mode) = modes.get(&(r.product_id, r.store_id)) {
                if r.year == base_year && r.price == *mode {
                    f.ends_99 = true;
                } else if r.year >= post_year {
                    if r.price.agorot() == mode.agorot() - 9 {
                        f.ends_90 = true;
                    } else if r.price.agorot() == mode.agorot() + 1 {
                        f.ends_00 = true;
                    }
                }
            }
            Some(f)
        })
        .collect();
    Ok(DummyAssignment {
        base_year,
        post_year,
        modes,
        flags,
    })
}

/// Keep only records whose price persisted unchanged for at least
/// `min_weeks` consecutive weeks within the (product, store) pair.
///
/// A run is a maximal stretch of week numbers w, w+1, w+2, ... with the
/// same posted price; a gap in week coverage ends the run even if the
/// price matches on the far side. Values of `min_weeks` below 2 keep
/// every record.
pub fn filter_durable_prices(panel: &DemandPanel, min_weeks: u32) -> DemandPanel {
    if min_weeks <= 1 {
        return panel.clone();
    }
    let mut by_pair: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    for (index, r) in panel.records.iter().enumerate() {
        by_pair
            .entry((r.product_id, r.store_id))
            .or_default()
            .push(index);
    }
    let mut keep = vec![false; panel.records.len()];
    for indices in by_pair.values_mut() {
        indices.sort_by_key(|&i| panel.records[i].week);
        let mut run_start = 0;
        for pos in 0..=indices.len() {
            let extends = pos > 0 && pos < indices.len() && {
                let prev = &panel.records[indices[pos - 1]];
                let here = &panel.records[indices[pos]];
                here.week == prev.week + 1 && here.price == prev.price
            };
            if pos == indices.len() || (pos > 0 && !extends) {
                if (pos - run_start) as u32 >= min_weeks {
                    for &i in &indices[run_start..pos] {
                        keep[i] = true;
                    }
                }
                run_start = pos;
            }
        }
    }
    DemandPanel {
        records: panel
            .records
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(r, _)| *r)
            .collect(),
    }
}

/// Fixed-effect groupings available to [`estimate_demand`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FixedEffect {
    ProductStore,
    CategoryYear,
    CategoryMonth,
    Chain,
}

impl FixedEffect {
    fn name(self) -> &'static str {
        match self {
            FixedEffect::ProductStore => "product_store",
            FixedEffect::CategoryYear => "category_year",
            FixedEffect::CategoryMonth => "category_month",
            FixedEffect::Chain => "chain",
        }
    }
}

/// Which ending variation a (product, store) pair must exhibit to enter
/// the estimation sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Restriction {
    /// The pair has at least one 90-ending and at least one 00-ending
    /// post-period observation.
    BothEndings,
    /// The pair has at least one of the two.
    EitherEnding,
}

/// Row filters applied before estimation.
#[derive(Clone, Copy, Debug)]
pub struct SampleRestrictions {
    /// Keep records strictly below this price.
    pub price_cap: Option<Money>,
    pub restriction: Restriction,
    /// Keep records with year strictly below this cutoff. Pair
    /// qualification under `restriction` is decided before the cutoff.
    pub cutoff_year: Option<i32>,
    /// Include the base-year modal-price indicator as a regressor.
    pub include_d99: bool,
}

impl Default for SampleRestrictions {
    fn default() -> SampleRestrictions {
        SampleRestrictions {
            price_cap: None,
            restriction: Restriction::BothEndings,
            cutoff_year: None,
            include_d99: true,
        }
    }
}

/// Output of [`estimate_demand`].
#[derive(Clone, Debug)]
pub struct RegressionResult {
    /// Demand shift at 90-ending prices.
    pub beta90: f64,
    pub se_beta90: f64,
    /// Demand shift at 00-ending prices.
    pub beta00: f64,
    pub se_beta00: f64,
    /// Demand shift at the base-year modal price, when included.
    pub beta99: Option<f64>,
    pub se_beta99: Option<f64>,
    /// Log-log price elasticity.
    pub epsilon: f64,
    pub se_epsilon: f64,
    /// Grand intercept implied by the sample means.
    pub intercept: f64,
    pub n_observations: usize,
    /// Average price over the estimation sample, in NIS.
    pub mean_price_nis: f64,
    /// Implied attention weight, `None` when the elasticity is not
    /// negative.
    pub theta_hat: Option<f64>,
    /// Demeaning sweeps spent absorbing fixed effects.
    pub sweeps: u32,
}

/// The attention weight implied by regression estimates:
/// `(beta90 - beta00) / (-epsilon) * mean_price`. Errors when the
/// elasticity is not strictly negative.
pub fn theta_from_parts(
    beta90: f64,
    beta00: f64,
    epsilon: f64,
    mean_price_nis: f64,
) -> Result<f64, EconError> {
    if epsilon >= 0.0 || epsilon.is_nan() {
        return Err(EconError::NonNegativeElasticity { epsilon });
    }
    Ok((beta90 - beta00) / (-epsilon) * mean_price_nis)
}

/// The attention weight implied by a fitted regression.
pub fn compute_theta(result: &RegressionResult) -> Result<f64, EconError> {
    theta_from_parts(
        result.beta90,
        result.beta00,
        result.epsilon,
        result.mean_price_nis,
    )
}

/// Estimate log demand on ending dummies and log price with absorbed
/// fixed effects.
///
/// Rows enter in panel order after dropping cleaned records, records at
/// or above the price cap, records of pairs failing the ending
/// restriction, and records at or beyond the cutoff year. The assignment
/// must come from [`assign_dummies`] on the same panel.
pub fn estimate_demand(
    panel: &DemandPanel,
    assignment: &DummyAssignment,
    fixed_effects: &[FixedEffect],
    restrictions: &SampleRestrictions,
) -> Result<RegressionResult, EconError> {
    if assignment.flags.len() != panel.records.len() {
        return Err(EconError::MisalignedAssignment {
            records: panel.records.len(),
            flags: assignment.flags.len(),
        });
    }

    // Rows surviving cleaning and the price cap; qualification is decided
    // on this set, before any cutoff.
    let mut eligible: Vec<(usize, DummyFlags)> = Vec::new();
    for (index, r) in panel.records.iter().enumerate() {
        let Some(flags) = assignment.flags[index] else {
            continue;
        };
        if let Some(cap) = restrictions.price_cap {
            if r.price.agorot() >= cap.agorot() {
                continue;
            }
        }
        eligible.push((index, flags));
    }

    let mut qualifies: BTreeMap<(u64, u64), (bool, bool)> = BTreeMap::new();
    for (index, flags) in &eligible {
        let r = &panel.records[*index];
        let entry = qualifies.entry((r.product_id, r.store_id)).or_default();
        entry.0 |= flags.ends_90;
        entry.1 |= flags.ends_00;
    }

    let rows: Vec<(usize, DummyFlags)> = eligible
        .into_iter()
        .filter(|(index, _)| {
            let r = &panel.records[*index];
            let (has_90, has_00) = qualifies
                .get(&(r.product_id, r.store_id))
                .copied()
                .unwrap_or_default();
            let qualified = match restrictions.restriction {
                Restriction::BothEndings => has_90 && has_00,
                Restriction::EitherEnding => has_90 || has_00,
            };
            let under_cutoff = restrictions
                .cutoff_year
                .is_none_or(|cutoff| r.year < cutoff);
            qualified && under_cutoff
        })
        .collect();
    if rows.is_empty() {
        return Err(EconError::EmptySample);
    }

    let n = rows.len();
    let mut response = Vec::with_capacity(n);
    let mut d90 = Vec::with_capacity(n);
    let mut d00 = Vec::with_capacity(n);
    let mut d99 = Vec::with_capacity(n);
    let mut ln_price = Vec::with_capacity(n);
    let mut mean_price = 0.0f64;
    for (index, flags) in &rows {
        let r = &panel.records[*index];
        let price_nis = r.price.agorot() as f64 / 100.0;
        response.push(r.quantity.ln());
        d90.push(f64::from(u8::from(flags.ends_90)));
        d00.push(f64::from(u8::from(flags.ends_00)));
        d99.push(f64::from(u8::from(flags.ends_99)));
        ln_price.push(price_nis.ln());
        mean_price += price_nis;
    }
    mean_price /= n as f64;

    let mut columns = vec![Column::new("D90", d90), Column::new("D00", d00)];
    if restrictions.include_d99 {
        columns.push(Column::new("D99", d99));
    }
    columns.push(Column::new("ln_price", ln_price));

    let mut effects: Vec<FixedEffect> = fixed_effects.to_vec();
    effects.sort();
    effects.dedup();
    let groupings: Vec<Grouping> = effects
        .iter()
        .map(|fe| {
            let keys = rows.iter().map(|(index, _)| {
                let r = &panel.records[*index];
                match fe {
                    FixedEffect::ProductStore => (r.product_id, r.store_id as i64),
                    FixedEffect::CategoryYear => (r.category_id, i64::from(r.year)),
                    FixedEffect::CategoryMonth => (r.category_id, i64::from(r.month)),
                    FixedEffect::Chain => (r.chain_id, 0),
                }
            });
            Grouping::from_keys(fe.name(), keys)
        })
        .collect();

    let fit = fe::fit(&Design {
        response,
        columns,
        groupings,
        intercept: effects.is_empty(),
    })?;

    let price_slot = if restrictions.include_d99 { 3 } else { 2 };
    let beta90 = fit.coefficients[0];
    let beta00 = fit.coefficients[1];
    let epsilon = fit.coefficients[price_slot];
    let theta_hat = theta_from_parts(beta90, beta00, epsilon, mean_price).ok();
    Ok(RegressionResult {
        beta90,
        se_beta90: fit.standard_errors[0],
        beta00,
        se_beta00: fit.standard_errors[1],
        beta99: restrictions.include_d99.then(|| fit.coefficients[2]),
        se_beta99: restrictions.include_d99.then(|| fit.standard_errors[2]),
        epsilon,
        se_epsilon: fit.standard_errors[price_slot],
        intercept: fit.intercept,
        n_observations: n,
        mean_price_nis: mean_price,
        theta_hat,
        sweeps: fit.sweeps,
    })
}

/// Fixed-effect groupings available to [`price_change_premium`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PremiumFixedEffect {
    Year,
    Month,
    Product,
    Store,
}

impl PremiumFixedEffect {
    fn name(self) -> &'static str {
        match self {
            PremiumFixedEffect::Year => "year",
            PremiumFixedEffect::Month => "month",
            PremiumFixedEffect::Product => "product",
            PremiumFixedEffect::Store => "store",
        }
    }
}

/// Output of [`price_change_premium`].
#[derive(Clone, Debug)]
pub struct PremiumResult {
    /// Extra log price change when the new price ends in 90 agorot.
    pub beta_ninety: f64,
    pub se_ninety: f64,
    /// Mean log price change at non-90 endings (explicit or implied).
    pub intercept: f64,
    /// Price changes entering the regression.
    pub n_changes: usize,
    pub sweeps: u32,
}

/// Regress log price changes on an indicator for landing at a 90-ending
/// price.
///
/// A change is a pair of consecutive calendar months for the same
/// (product, store) with different prices; gaps in month coverage yield
/// no observation. Fixed effects are taken from the record where the new
/// price is observed.
pub fn price_change_premium(
    panel: &MonthlyPanel,
    fixed_effects: &[PremiumFixedEffect],
) -> Result<PremiumResult, EconError> {
    let mut order: Vec<usize> = (0..panel.records.len()).collect();
    order.sort_by_key(|&i| {
        let r = &panel.records[i];
        (r.product_id, r.store_id, r.year, r.month)
    });

    let month_index = |r: &MonthlyRecord| i64::from(r.year) * 12 + i64::from(r.month) - 1;
    let mut changes: Vec<usize> = Vec::new();
    let mut response = Vec::new();
    let mut ninety = Vec::new();
    for window in order.windows(2) {
        let prev = &panel.records[window[0]];
        let here = &panel.records[window[1]];
        if (prev.product_id, prev.store_id) != (here.product_id, here.store_id) {
            continue;
        }
        if month_index(here) != month_index(prev) + 1 || here.price == prev.price {
            continue;
        }
        changes.push(window[1]);
        response.push((here.price.agorot() as f64).ln() - (prev.price.agorot() as f64).ln());
        ninety.push(f64::from(u8::from(here.price.agorot() % 100 == 90)));
    }
    if changes.is_empty() {
        return Err(EconError::EmptySample);
    }

    let mut effects: Vec<PremiumFixedEffect> = fixed_effects.to_vec();
    effects.sort();
    effects.dedup();
    let groupings: Vec<Grouping> = effects
        .iter()
        .map(|fe| {
            let keys = changes.iter().map(|&i| {
                let r = &panel.records[i];
                match fe {
                    PremiumFixedEffect::Year => i64::from(r.year),
                    PremiumFixedEffect::Month => i64::from(r.month),
                    PremiumFixedEffect::Product => r.product_id as i64,
                    PremiumFixedEffect::Store => r.store_id as i64,
                }
            });
            Grouping::from_keys(fe.name(), keys)
        })
        .collect();

    let n = response.len();
    let fit = fe::fit(&Design {
        response,
        columns: vec![Column::new("D90_new", ninety)],
        groupings,
        intercept: effects.is_empty(),
    })?;
    Ok(PremiumResult {
        beta_ninety: fit.coefficients[0],
        se_ninety: fit.standard_errors[0],
        intercept: fit.intercept,
        n_changes: n,
        sweeps: fit.sweeps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(
        product_id: u64,
        store_id: u64,
        week: u32,
        year: i32,
        month: u32,
        price: i64,
        quantity: f64,
    ) -> PanelRecord {
        PanelRecord {
            product_id,
            store_id,
            chain_id: store_id % 4,
            category_id: product_id % 5,
            week,
            year,
            month,
            price: Money::from_agorot(price),
            quantity,
        }
    }

    #[test]
    fn modal_price_prefers_frequency_then_lower() {
        let mut records = Vec::new();
        let mut week = 0;
        for (price, count) in [(999, 30), (1099, 10), (990, 12)] {
            for _ in 0..count {
                records.push(record(1, 1, week, 2013, 1, price, 1.0));
                week += 1;
            }
        }
        let panel = DemandPanel::new(records).unwrap();
        assert_eq!(
            find_modal_99_price(&panel, 1, 1, 2013),
            Some(Money::from_agorot(999))
        );

        let tie = DemandPanel::new(vec![
            record(2, 1, 0, 2013, 1, 1199, 1.0),
            record(2, 1, 1, 2013, 1, 999, 1.0),
        ])
        .unwrap();
        assert_eq!(
            find_modal_99_price(&tie, 2, 1, 2013),
            Some(Money::from_agorot(999))
        );

        let none = DemandPanel::new(vec![record(3, 1, 0, 2013, 1, 990, 1.0)]).unwrap();
        assert_eq!(find_modal_99_price(&none, 3, 1, 2013), None);
        assert_eq!(find_modal_99_price(&none, 3, 9, 2013), None);
    }

    #[test]
    fn dummies_follow_the_modal_price() {
        let panel = DemandPanel::new(vec![
            record(1, 1, 0, 2013, 1, 999, 1.0),
            record(1, 1, 1, 2013, 1, 999, 1.0),
            record(1, 1, 2, 2013, 2, 899, 1.0),
            record(1, 1, 60, 2014, 1, 1000, 1.0),
            record(1, 1, 61, 2014, 2, 990, 1.0),
            record(1, 1, 62, 2014, 3, 995, 1.0),
            record(1, 1, 63, 2014, 4, 1100, 1.0),
        ])
        .unwrap();
        let assignment = assign_dummies(&panel, 2013, 2014).unwrap();
        let f = |i: usize| assignment.flags[i].unwrap();
        assert_eq!(
            assignment.modes.get(&(1, 1)),
            Some(&Money::from_agorot(999))
        );
        assert!(f(0).ends_99 && !f(0).ends_90 && !f(0).ends_00);
        assert!(f(1).ends_99);
        // A 99-ending base price that is not the mode carries no flag.
        assert_eq!(f(2), DummyFlags::default());
        assert!(f(3).ends_00);
        assert!(f(4).ends_90);
        assert_eq!(assignment.flags[5], None);
        assert_eq!(f(6), DummyFlags::default());

        assert!(matches!(
            assign_dummies(&panel, 2014, 2014),
            Err(EconError::YearOrder { .. })
        ));
    }

    #[test]
    fn cleaning_applies_without_a_modal_price() {
        let panel = DemandPanel::new(vec![
            record(1, 1, 0, 2013, 1, 990, 1.0),
            record(1, 1, 60, 2014, 1, 995, 1.0),
        ])
        .unwrap();
        let assignment = assign_dummies(&panel, 2013, 2014).unwrap();
        assert_eq!(assignment.flags[0], Some(DummyFlags::default()));
        assert_eq!(assignment.flags[1], None);
        assert!(assignment.modes.is_empty());
    }

    #[test]
    fn durability_filter_drops_short_runs() {
        let panel = DemandPanel::new(vec![
            record(1, 1, 1, 2013, 1, 999, 1.0),
            record(1, 1, 2, 2013, 1, 999, 1.0),
            record(1, 1, 3, 2013, 1, 999, 1.0),
            record(1, 1, 4, 2013, 1, 990, 1.0),
            record(1, 1, 5, 2013, 2, 999, 1.0),
            record(1, 1, 6, 2013, 2, 999, 1.0),
        ])
        .unwrap();
        let filtered = filter_durable_prices(&panel, 2);
        let weeks: Vec<u32> = filtered.records.iter().map(|r| r.week).collect();
        assert_eq!(weeks, vec![1, 2, 3, 5, 6]);

        let identity = filter_durable_prices(&panel, 1);
        assert_eq!(identity.len(), panel.len());
        let zero = filter_durable_prices(&panel, 0);
        assert_eq!(zero.len(), panel.len());

        let triple = filter_durable_prices(&panel, 3);
        let weeks: Vec<u32> = triple.records.iter().map(|r| r.week).collect();
        assert_eq!(weeks, vec![1, 2, 3]);
    }

    #[test]
    fn durability_filter_breaks_runs_at_week_gaps() {
        let panel = DemandPanel::new(vec![
            record(1, 1, 1, 2013, 1, 999, 1.0),
            record(1, 1, 3, 2013, 1, 999, 1.0),
        ])
        .unwrap();
        assert!(filter_durable_prices(&panel, 2).is_empty());
    }

    #[test]
    fn durability_filter_is_monotone() {
        let mut records = Vec::new();
        let mut state = 17u64;
        for product in 0..3u64 {
            for week in 0..40u32 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let price = 900 + ((state >> 40) % 5) as i64 * 33;
                records.push(record(product, 1, week, 2013, 1 + week % 12, price, 1.0));
            }
        }
        let panel = DemandPanel::new(records).unwrap();
        let mut previous = panel.len();
        for min_weeks in 1..8 {
            let kept = filter_durable_prices(&panel, min_weeks).len();
            assert!(kept <= previous, "min_weeks {min_weeks} kept {kept} > {previous}");
            previous = kept;
        }
    }

    #[test]
    fn panel_validation_rejects_bad_records() {
        let good = record(1, 1, 0, 2013, 1, 999, 1.0);
        assert!(DemandPanel::new(vec![good, record(1, 1, 0, 2013, 2, 899, 1.0)]).is_err());
        assert!(DemandPanel::new(vec![record(1, 1, 0, 2013, 1, 999, 0.0)]).is_err());
        assert!(DemandPanel::new(vec![record(1, 1, 0, 2013, 1, 999, f64::NAN)]).is_err());
        assert!(DemandPanel::new(vec![record(1, 1, 0, 2013, 1, 0, 1.0)]).is_err());
        assert!(DemandPanel::new(vec![record(1, 1, 0, 2013, 13, 999, 1.0)]).is_err());
    }

    /// Build a noise-free panel with known coefficients: pair effects plus
    /// ending dummies plus a log price slope.
    fn synthetic_panel() -> DemandPanel {
        let (beta90, beta00, beta99, epsilon) = (0.05, 0.02, 0.03, -1.4);
        let mut records = Vec::new();
        for product in 0..4u64 {
            for store in 0..3u64 {
                let pair_effect = 0.05 * (product as f64 + 1.0) * (store as f64 + 1.0);
                for week in 0..20u32 {
                    // Two flag-free price points per year, at levels that
                    // differ across products, keep log price identified
                    // alongside the ending dummies under any of the
                    // fixed-effect sets.
                    let (year, pattern) = if week < 10 {
                        (
                            2013,
                            match week % 4 {
                                0 | 2 => 999,
                                1 => 1099,
                                _ => 1049,
                            },
                        )
                    } else {
                        (
                            2014,
                            match week % 4 {
                                0 => 990,
                                1 => 1000,
                                2 => 1100,
                                _ => 1080,
                            },
                        )
                    };
                    let price = pattern + 200 * product as i64;
                    let d90 = f64::from(u8::from(year == 2014 && pattern == 990));
                    let d00 = f64::from(u8::from(year == 2014 && pattern == 1000));
                    let d99 = f64::from(u8::from(year == 2013 && pattern == 999));
                    let ln_p = (price as f64 / 100.0).ln();
                    let ln_q = 2.0
                        + pair_effect
                        + beta90 * d90
                        + beta00 * d00
                        + beta99 * d99
                        + epsilon * ln_p;
                    records.push(record(
                        product,
                        store,
                        week,
                        year,
                        1 + week % 12,
                        price,
                        ln_q.exp(),
                    ));
                }
            }
        }
        DemandPanel::new(records).unwrap()
    }

    #[test]
    fn noise_free_panel_recovers_coefficients() {
        let panel = synthetic_panel();
        let assignment = assign_dummies(&panel, 2013, 2014).unwrap();
        let result = estimate_demand(
            &panel,
            &assignment,
            &[FixedEffect::ProductStore],
            &SampleRestrictions::default(),
        )
        .unwrap();
        assert!((result.beta90 - 0.05).abs() < 1e-8, "beta90 {}", result.beta90);
        assert!((result.beta00 - 0.02).abs() < 1e-8, "beta00 {}", result.beta00);
        assert!((result.beta99.unwrap() - 0.03).abs() < 1e-8);
        assert!((result.epsilon + 1.4).abs() < 1e-8, "epsilon {}", result.epsilon);
        assert_eq!(result.n_observations, panel.len());
        let expected_theta = (0.05 - 0.02) / 1.4 * result.mean_price_nis;
        assert!((result.theta_hat.unwrap() - expected_theta).abs() < 1e-8);
        assert!(result.se_beta90 < 1e-7);
    }

    #[test]
    fn estimation_matches_across_fe_sets_on_noise_free_data() {
        // The synthetic design nests category and chain effects inside
        // pair effects, so adding those groupings must not move the slopes.
        let panel = synthetic_panel();
        let assignment = assign_dummies(&panel, 2013, 2014).unwrap();
        let narrow = estimate_demand(
            &panel,
            &assignment,
            &[FixedEffect::ProductStore],
            &SampleRestrictions::default(),
        )
        .unwrap();
        let wide = estimate_demand(
            &panel,
            &assignment,
            &[
                FixedEffect::ProductStore,
                FixedEffect::CategoryYear,
                FixedEffect::CategoryMonth,
                FixedEffect::Chain,
            ],
            &SampleRestrictions::default(),
        )
        .unwrap();
        assert!((narrow.beta90 - wide.beta90).abs() < 1e-7);
        assert!((narrow.beta00 - wide.beta00).abs() < 1e-7);
        assert!((narrow.epsilon - wide.epsilon).abs() < 1e-7);
        assert!(wide.sweeps >= narrow.sweeps);
    }

    #[test]
    fn restriction_both_drops_one_sided_pairs() {
        // Pair (1,1) sees both endings after the switch; pair (2,1) posts
        // a 90 ending but never a 00 ending.
        let panel = DemandPanel::new(vec![
            record(1, 1, 0, 2013, 1, 999, 2.0),
            record(1, 1, 1, 2013, 2, 999, 2.1),
            record(1, 1, 2, 2013, 3, 1099, 1.9),
            record(1, 1, 60, 2014, 1, 990, 2.2),
            record(1, 1, 61, 2014, 2, 1000, 2.0),
            record(1, 1, 62, 2014, 3, 1100, 1.8),
            record(2, 1, 0, 2013, 1, 899, 3.0),
            record(2, 1, 1, 2013, 2, 899, 3.2),
            record(2, 1, 60, 2014, 1, 890, 3.1),
            record(2, 1, 61, 2014, 2, 820, 2.9),
        ])
        .unwrap();
        let assignment = assign_dummies(&panel, 2013, 2014).unwrap();
        assert_eq!(assignment.modes.get(&(2, 1)), Some(&Money::from_agorot(899)));
        let flags_90: usize = assignment
            .flags
            .iter()
            .flatten()
            .filter(|f| f.ends_90)
            .count();
        assert_eq!(flags_90, 2);

        let both = estimate_demand(
            &panel,
            &assignment,
            &[FixedEffect::ProductStore],
            &SampleRestrictions::default(),
        )
        .unwrap();
        assert_eq!(both.n_observations, 6);

        let either = estimate_demand(
            &panel,
            &assignment,
            &[FixedEffect::ProductStore],
            &SampleRestrictions {
                restriction: Restriction::EitherEnding,
                ..SampleRestrictions::default()
            },
        )
        .unwrap();
        assert_eq!(either.n_observations, 10);
    }

    #[test]
    fn price_cap_and_cutoff_drop_rows() {
        let panel = synthetic_panel();
        let assignment = assign_dummies(&panel, 2013, 2014).unwrap();
        let capped = estimate_demand(
            &panel,
            &assignment,
            &[FixedEffect::ProductStore],
            &SampleRestrictions {
                price_cap: Some(Money::from_agorot(1100)),
                ..SampleRestrictions::default()
            },
        )
        .unwrap();
        // Weeks at price exactly 1100 fall away (strictly below the cap).
        let at_cap = panel
            .records
            .iter()
            .filter(|r| r.price.agorot() >= 1100)
            .count();
        assert_eq!(capped.n_observations, panel.len() - at_cap);

        let cut = estimate_demand(
            &panel,
            &assignment,
            &[FixedEffect::ProductStore],
            &SampleRestrictions {
                cutoff_year: Some(2014),
                ..SampleRestrictions::default()
            },
        );
        // Only base-year rows remain, leaving the 90 dummy all-zero, so
        // the fit must fail rather than invent estimates.
        match cut {
            Err(EconError::Fit(FeError::RankDeficient { column })) => assert_eq!(column, "D90"),
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn excluding_the_99_dummy_shrinks_the_design() {
        let panel = synthetic_panel();
        let assignment = assign_dummies(&panel, 2013, 2014).unwrap();
        let result = estimate_demand(
            &panel,
            &assignment,
            &[FixedEffect::ProductStore],
            &SampleRestrictions {
                include_d99: false,
                ..SampleRestrictions::default()
            },
        )
        .unwrap();
        assert!(result.beta99.is_none());
        assert!(result.se_beta99.is_none());
        // With the 99 indicator omitted its effect loads onto the other
        // coefficients, so the slope no longer matches exactly.
        assert!(result.epsilon < 0.0);
    }

    #[test]
    fn misaligned_assignment_is_rejected() {
        let panel = synthetic_panel();
        let mut assignment = assign_dummies(&panel, 2013, 2014).unwrap();
        assignment.flags.pop();
        assert!(matches!(
            estimate_demand(
                &panel,
                &assignment,
                &[FixedEffect::ProductStore],
                &SampleRestrictions::default(),
            ),
            Err(EconError::MisalignedAssignment { .. })
        ));
    }

    #[test]
    fn attention_weight_worked_examples() {
        let a = theta_from_parts(0.031, 0.020, -0.65, 12.70).unwrap();
        assert!((a - 0.2149).abs() < 5e-5, "{a}");
        let b = theta_from_parts(0.038, 0.011, -0.67, 7.56).unwrap();
        assert!((b - 0.3047).abs() < 5e-5, "{b}");
        let zero = theta_from_parts(0.02, 0.02, -1.0, 10.0).unwrap();
        assert_eq!(zero, 0.0);
        assert!(matches!(
            theta_from_parts(0.03, 0.02, 0.0, 10.0),
            Err(EconError::NonNegativeElasticity { .. })
        ));
        assert!(matches!(
            theta_from_parts(0.03, 0.02, 0.4, 10.0),
            Err(EconError::NonNegativeElasticity { .. })
        ));
    }

    #[test]
    fn theta_scales_with_mean_price() {
        let base = theta_from_parts(0.04, 0.01, -0.5, 10.0).unwrap();
        let doubled = theta_from_parts(0.04, 0.01, -0.5, 20.0).unwrap();
        assert!((doubled - 2.0 * base).abs() < 1e-12);
        let halved_elasticity = theta_from_parts(0.04, 0.01, -0.25, 10.0).unwrap();
        assert!((halved_elasticity - 2.0 * base).abs() < 1e-12);
    }

    #[test]
    fn panel_roundtrip_is_exact() {
        let dir = std::env::temp_dir().join("agora-econ-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("panel_roundtrip.csv");
        let panel = DemandPanel::new(vec![
            record(1, 1, 0, 2013, 1, 999, 1.5),
            record(1, 1, 1, 2013, 2, 999, 0.1 + 0.2),
            record(2, 3, 7, 2014, 3, 1000, 12345.678901234567),
        ])
        .unwrap();
        save_panel(&panel, &path).unwrap();
        let loaded = load_panel(&path).unwrap();
        assert_eq!(loaded.records, panel.records);
    }

    #[test]
    fn monthly_roundtrip_and_validation() {
        let dir = std::env::temp_dir().join("agora-econ-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("monthly_roundtrip.csv");
        let make = |month: u32, price: i64| MonthlyRecord {
            product_id: 1,
            store_id: 2,
            chain_id: 3,
            category_id: 4,
            year: 2013,
            month,
            price: Money::from_agorot(price),
        };
        let panel = MonthlyPanel::new(vec![make(1, 999), make(2, 1090)]).unwrap();
        save_monthly(&panel, &path).unwrap();
        let loaded = load_monthly(&path).unwrap();
        assert_eq!(loaded.records, panel.records);

        assert!(MonthlyPanel::new(vec![make(1, 999), make(1, 888)]).is_err());
        assert!(MonthlyPanel::new(vec![make(0, 999)]).is_err());
        assert!(MonthlyPanel::new(vec![make(1, 0)]).is_err());
    }

    #[test]
    fn load_rejects_missing_file_and_bad_rows() {
        let dir = std::env::temp_dir().join("agora-econ-tests");
        std::fs::create_dir_all(&dir).unwrap();
        assert!(load_panel(dir.join("does_not_exist.csv")).is_err());

        let path = dir.join("bad_quantity.csv");
        std::fs::write(
            &path,
            "product_id,store_id,chain_id,category_id,week,year,month,price_agorot,quantity\n\
             1,1,0,0,0,2013,1,999,-2.0\n",
        )
        .unwrap();
        assert!(matches!(
            load_panel(&path),
            Err(EconError::QuantityOutOfRange { .. })
        ));

        let path = dir.join("bad_field.csv");
        std::fs::write(
            &path,
            "product_id,store_id,chain_id,category_id,week,year,month,price_agorot,quantity\n\
             1,1,0,0,0,2013,1,abc,1.0\n",
        )
        .unwrap();
        let err = load_panel(&path).unwrap_err();
        assert!(err.to_string().contains("price_agorot"), "{err}");
    }

    fn monthly(
        product_id: u64,
        store_id: u64,
        year: i32,
        month: u32,
        price: i64,
    ) -> MonthlyRecord {
        MonthlyRecord {
            product_id,
            store_id,
            chain_id: store_id % 4,
            category_id: product_id % 5,
            year,
            month,
            price: Money::from_agorot(price),
        }
    }

    #[test]
    fn premium_counts_only_consecutive_changes() {
        let panel = MonthlyPanel::new(vec![
            monthly(1, 1, 2013, 1, 999),
            monthly(1, 1, 2013, 2, 1090),
            monthly(1, 1, 2013, 3, 1090),
            monthly(1, 1, 2013, 4, 1200),
            monthly(1, 1, 2013, 5, 1250),
            monthly(1, 1, 2013, 7, 1300),
        ])
        .unwrap();
        let result = price_change_premium(&panel, &[]).unwrap();
        // Changes: month 2 (to a 90 ending), month 4, month 5. The move to
        // month 7 crosses a gap and the month 3 repeat is not a change.
        assert_eq!(result.n_changes, 3);
        let y1 = (1090f64 / 999.0).ln();
        let y2 = (1200f64 / 1090.0).ln();
        let y3 = (1250f64 / 1200.0).ln();
        let expected_intercept = (y2 + y3) / 2.0;
        assert!((result.intercept - expected_intercept).abs() < 1e-12);
        assert!((result.beta_ninety - (y1 - expected_intercept)).abs() < 1e-12);
    }

    #[test]
    fn premium_spans_year_boundaries() {
        let panel = MonthlyPanel::new(vec![
            monthly(1, 1, 2013, 12, 1000),
            monthly(1, 1, 2014, 1, 1100),
            monthly(2, 1, 2013, 12, 800),
            monthly(2, 1, 2014, 1, 890),
            monthly(3, 1, 2013, 12, 500),
            monthly(3, 1, 2014, 1, 550),
        ])
        .unwrap();
        let result = price_change_premium(&panel, &[]).unwrap();
        assert_eq!(result.n_changes, 3);
    }

    #[test]
    fn identical_changes_give_zero_premium() {
        // Three changes with the same log step, one landing on a 90
        // ending: the dummy coefficient and its error are both zero.
        let panel = MonthlyPanel::new(vec![
            monthly(1, 1, 2013, 1, 1000),
            monthly(1, 1, 2013, 2, 1090),
            monthly(2, 1, 2013, 1, 2000),
            monthly(2, 1, 2013, 2, 2180),
            monthly(3, 1, 2013, 1, 4000),
            monthly(3, 1, 2013, 2, 4360),
        ])
        .unwrap();
        let result = price_change_premium(&panel, &[]).unwrap();
        assert_eq!(result.n_changes, 3);
        assert!(result.beta_ninety.abs() < 1e-12);
        assert!(result.se_ninety.abs() < 1e-10);
    }

    #[test]
    fn planted_premium_is_recovered() {
        let mut state = 41u64;
        let mut lcg = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64)
        };
        let premium = 0.04;
        // Large prices keep the snap to a fixed ending small in logs, so
        // the planted premium dominates.
        let mut records = Vec::new();
        for product in 0..200u64 {
            let to_ninety = product % 2 == 0;
            let start: i64 = 100_000 + (product as i64 % 50) * 1000;
            let drift = 0.05 + 0.01 * (lcg() - 0.5);
            let step = if to_ninety {
                let target = (start as f64 * (drift + premium).exp()).round() as i64;
                target - target % 100 + 90
            } else {
                let target = (start as f64 * drift.exp()).round() as i64;
                target - target % 100 + 40
            };
            records.push(monthly(product, 1, 2013, 1, start));
            records.push(monthly(product, 1, 2013, 2, step));
        }
        let panel = MonthlyPanel::new(records).unwrap();
        let result = price_change_premium(&panel, &[]).unwrap();
        assert_eq!(result.n_changes, 200);
        // Rounding to endings perturbs each step, so allow a few standard
        // errors around the planted premium.
        assert!(
            (result.beta_ninety - premium).abs() < 4.0 * result.se_ninety.max(1e-4),
            "beta {} se {}",
            result.beta_ninety,
            result.se_ninety
        );
    }

    #[test]
    fn premium_with_fixed_effects_runs() {
        let mut records = Vec::new();
        for product in 0..30u64 {
            for store in 0..2u64 {
                let base = 900 + 10 * (product as i64 % 12);
                records.push(monthly(product, store, 2013, 1, base));
                let landing = if (product + store) % 3 == 0 { 1090 } else { 1000 + 10 * (product as i64 % 7) };
                records.push(monthly(product, store, 2013, 2, landing));
                records.push(monthly(product, store, 2013, 3, landing + 110));
            }
        }
        let panel = MonthlyPanel::new(records).unwrap();
        let plain = price_change_premium(&panel, &[]).unwrap();
        let with_fe = price_change_premium(
            &panel,
            &[
                PremiumFixedEffect::Year,
                PremiumFixedEffect::Month,
                PremiumFixedEffect::Product,
                PremiumFixedEffect::Store,
            ],
        )
        .unwrap();
        assert_eq!(plain.n_changes, with_fe.n_changes);
        assert!(with_fe.se_ninety.is_finite());
    }
}
