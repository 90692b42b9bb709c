//! Price-ending analytics and the cash-inattention penalty: mod-100 ending
//! histograms with a ten-agora segment view, average agorot paid per price
//! under an explicit cap, and penalty tables that price a shift in average
//! endings against annual unit volumes.
//!
//! Shares and means are exact rationals. Penny means enter the penalty
//! arithmetic at 0.1-agora resolution (halves to even) in the default
//! one-decimal mode, matching tables published at one decimal; an exact mode
//! skips that rounding. Whole-NIS presentation values round halves away from
//! zero.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::Datelike;
use thiserror::Error;

use crate::dist::{parse_field, record_line, DistError, PriceObservation, StoreType};
use crate::money::Money;
use crate::numeric::{div_round_half_away, ratio_round_half_even, Rational};

/// Errors from ending analytics and penalty aggregation.
#[derive(Debug, Error)]
pub enum PenaltyError {
    #[error(transparent)]
    Data(#[from] DistError),
    #[error("no price observations to analyze")]
    NoObservations,
    #[error("residue range {lo}..={hi} is not within 0..=99")]
    ResidueRange { lo: u8, hi: u8 },
    #[error("last digit {digit} is not within 0..=9")]
    LastDigitRange { digit: u8 },
    #[error("histograms describe different store types: {left} vs {right}")]
    StoreTypeMismatch { left: StoreType, right: StoreType },
    #[error("price cap mismatch: after sample {after}, before sample {before}")]
    CapMismatch { after: String, before: String },
    #[error("{store_type}: no {side} penny statistics for this store type")]
    MissingGroup {
        store_type: StoreType,
        side: &'static str,
    },
    #[error("{store_type}: multiple {side} penny statistics for this store type")]
    AmbiguousGroup {
        store_type: StoreType,
        side: &'static str,
    },
    #[error("volume table is empty")]
    NoVolumes,
    #[error("line {line}: duplicate volume row for {store_type}")]
    DuplicateVolume { line: u64, store_type: StoreType },
    #[error("line {line}: unit volume for {store_type} must be positive")]
    ZeroVolume { line: u64, store_type: StoreType },
    #[error("penalty total overflows the whole-NIS presentation range")]
    Overflow,
}

/// Distribution of price endings (price mod 100) for one store type and year.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndingHistogram {
    /// Store type of the group.
    pub store_type: StoreType,
    /// Calendar year of the group.
    pub year: i32,
    counts: [u64; 100],
    n: u64,
}

impl EndingHistogram {
    /// Number of observations behind the histogram.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Observation counts per ending residue 0..=99.
    pub fn counts(&self) -> &[u64; 100] {
        &self.counts
    }

    /// Exact share of a single ending residue.
    pub fn share(&self, residue: u8) -> Result<Rational, PenaltyError> {
        self.share_in_range(residue, residue)
    }

    /// Exact summed share of the contiguous residue range `lo..=hi`.
    pub fn share_in_range(&self, lo: u8, hi: u8) -> Result<Rational, PenaltyError> {
        if lo > hi || hi > 99 {
            return Err(PenaltyError::ResidueRange { lo, hi });
        }
        let count: u64 = self.counts[lo as usize..=hi as usize].iter().sum();
        Ok(Rational::new(count as i128, self.n as i128))
    }

    /// Exact share of prices whose agorot amount ends in `digit`, summed over
    /// the ten residues with that last digit (9 covers 9, 19, ..., 99). The
    /// residue class is not contiguous, so `share_in_range` cannot express it.
    pub fn share_of_last_digit(&self, digit: u8) -> Result<Rational, PenaltyError> {
        if digit > 9 {
            return Err(PenaltyError::LastDigitRange { digit });
        }
        let count: u64 = (0..10)
            .map(|tens| self.counts[tens * 10 + digit as usize])
            .sum();
        Ok(Rational::new(count as i128, self.n as i128))
    }

    /// Shares aggregated into ten-agora segments (00-09, 10-19, ..., 90-99).
    pub fn segment_shares(&self) -> [Rational; 10] {
        std::array::from_fn(|segment| {
            let count: u64 = self.counts[segment * 10..segment * 10 + 10].iter().sum();
            Rational::new(count as i128, self.n as i128)
        })
    }
}

/// Count price endings mod 100 per (store type, year) group.
///
/// Groups are returned in store-type presentation order, years ascending
/// within each store type. Callers wanting a capped distribution filter the
/// observations first; no cap is applied here.
pub fn ending_histogram(
    observations: &[PriceObservation],
) -> Result<Vec<EndingHistogram>, PenaltyError> {
    if observations.is_empty() {
        return Err(PenaltyError::NoObservations);
    }
    let mut groups: BTreeMap<(StoreType, i32), [u64; 100]> = BTreeMap::new();
    for observation in observations {
        let key = (observation.store_type, observation.date.year());
        let counts = groups.entry(key).or_insert([0; 100]);
        counts[observation.price.ending() as usize] += 1;
    }
    Ok(groups
        .into_iter()
        .map(|((store_type, year), counts)| EndingHistogram {
            store_type,
            year,
            n: counts.iter().sum(),
            counts,
        })
        .collect())
}

/// Relative change in each ten-agora segment share between two histograms of
/// the same store type: `(to - from) / from` per segment, `None` where the
/// starting share is zero (undefined rather than infinite).
pub fn segment_change(
    from: &EndingHistogram,
    to: &EndingHistogram,
) -> Result<[Option<Rational>; 10], PenaltyError> {
    if from.store_type != to.store_type {
        return Err(PenaltyError::StoreTypeMismatch {
            left: from.store_type,
            right: to.store_type,
        });
    }
    let from_shares = from.segment_shares();
    let to_shares = to.segment_shares();
    Ok(std::array::from_fn(|segment| {
        let base = from_shares[segment];
        if *base.numer() == 0 {
            None
        } else {
            Some((to_shares[segment] - base) / base)
        }
    }))
}

/// Average agorot paid per price for one store type and year.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PennyStats {
    /// Store type of the group.
    pub store_type: StoreType,
    /// Calendar year of the group.
    pub year: i32,
    /// Cap the sample was filtered by (`None` means uncapped). Prices at or
    /// above the cap were excluded.
    pub price_cap: Option<Money>,
    /// Number of prices that passed the cap filter.
    pub n_prices: u64,
    mean: Rational,
}

impl PennyStats {
    /// Exact mean ending in agorot, always within 0..=99.
    pub fn mean(&self) -> Rational {
        self.mean
    }

    /// Mean ending at 0.1-agora resolution, halves to even (69.3 -> 693).
    pub fn mean_deci_agorot(&self) -> i64 {
        ratio_round_half_even(&(self.mean * Rational::from_integer(10))) as i64
    }
}

/// Per-group penny statistics plus the groups the cap filter emptied out
/// (flagged rather than silently dropped).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PennyReport {
    /// Statistics per (store type, year) group, in presentation order.
    pub stats: Vec<PennyStats>,
    /// Groups whose every price fell at or above the cap.
    pub omitted: Vec<(StoreType, i32)>,
}

/// Mean price ending (price mod 100) per (store type, year) group, over
/// prices strictly below `price_cap` when one is given.
///
/// The cap is an explicit parameter with no default because capped and
/// uncapped means differ materially; every table must state which convention
/// it uses.
pub fn avg_pennies(
    observations: &[PriceObservation],
    price_cap: Option<Money>,
) -> Result<PennyReport, PenaltyError> {
    if observations.is_empty() {
        return Err(PenaltyError::NoObservations);
    }
    let mut groups: BTreeMap<(StoreType, i32), (u64, u64)> = BTreeMap::new();
    for observation in observations {
        let key = (observation.store_type, observation.date.year());
        let (ending_sum, count) = groups.entry(key).or_insert((0, 0));
        if price_cap.is_none_or(|cap| observation.price < cap) {
            *ending_sum += observation.price.ending() as u64;
            *count += 1;
        }
    }
    let mut stats = Vec::new();
    let mut omitted = Vec::new();
    for ((store_type, year), (ending_sum, count)) in groups {
        if count == 0 {
            omitted.push((store_type, year));
        } else {
            stats.push(PennyStats {
                store_type,
                year,
                price_cap,
                n_prices: count,
                mean: Rational::new(ending_sum as i128, count as i128),
            });
        }
    }
    Ok(PennyReport { stats, omitted })
}

/// How penny means enter the penalty arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PenaltyMode {
    /// Round each mean to 0.1 agora (halves to even) before differencing.
    /// Tables published at one decimal reproduce under this mode.
    OneDecimal,
    /// Difference the exact means with no intermediate rounding.
    Exact,
}

/// One store type's row of a penalty table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PenaltyRow {
    /// Store type of the row.
    pub store_type: StoreType,
    /// Year the after sample was drawn from.
    pub year_after: i32,
    /// Year the before sample was drawn from.
    pub year_before: i32,
    /// Mean ending of the after sample in agorot, rounded per mode.
    pub mean_after: Rational,
    /// Mean ending of the before sample in agorot, rounded per mode.
    pub mean_before: Rational,
    /// `mean_after - mean_before` in agorot.
    pub difference: Rational,
    /// Annual units sold for the store type.
    pub volume: u64,
    /// Exact penalty in agorot: `difference * volume`.
    pub total_agorot: Rational,
    /// Whole-NIS presentation of the penalty, halves away from zero.
    pub total_nis: i64,
}

/// Penalty aggregation across store types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PenaltyTable {
    /// Cap shared by both input samples.
    pub price_cap: Option<Money>,
    /// Rounding mode the rows were computed under.
    pub mode: PenaltyMode,
    /// Per-store rows, in the order of the volume table.
    pub rows: Vec<PenaltyRow>,
    /// Exact sum of the row totals in agorot.
    pub grand_total_agorot: Rational,
    /// Whole-NIS presentation of the exact grand total. Computed from the
    /// exact sum, so it can differ by 1 from the sum of the rounded row
    /// totals.
    pub grand_total_nis: i64,
}

/// Price a shift in average endings against annual unit volumes.
///
/// For each store type in `volumes`, pairs the matching entries of
/// `stats_after` and `stats_before` and computes
/// `(mean_after - mean_before) * volume` exactly in agorot. Both samples
/// must have been computed under the same price cap. Negative differences
/// produce negative totals; nothing is clamped. Swapping the two samples
/// negates every total.
pub fn inattention_penalty(
    stats_after: &[PennyStats],
    stats_before: &[PennyStats],
    volumes: &[(StoreType, u64)],
    mode: PenaltyMode,
) -> Result<PenaltyTable, PenaltyError> {
    if volumes.is_empty() {
        return Err(PenaltyError::NoVolumes);
    }
    let mut rows = Vec::with_capacity(volumes.len());
    let mut table_cap: Option<Option<Money>> = None;
    for &(store_type, units) in volumes {
        let after = find_unique(stats_after, store_type, "after")?;
        let before = find_unique(stats_before, store_type, "before")?;
        if after.price_cap != before.price_cap {
            return Err(PenaltyError::CapMismatch {
                after: cap_label(after.price_cap),
                before: cap_label(before.price_cap),
            });
        }
        match table_cap {
            None => table_cap = Some(after.price_cap),
            Some(cap) if cap != after.price_cap => {
                return Err(PenaltyError::CapMismatch {
                    after: cap_label(after.price_cap),
                    before: cap_label(cap),
                });
            }
            Some(_) => {}
        }
        let (mean_after, mean_before) = match mode {
            PenaltyMode::OneDecimal => (
                Rational::new(after.mean_deci_agorot() as i128, 10),
                Rational::new(before.mean_deci_agorot() as i128, 10),
            ),
            PenaltyMode::Exact => (after.mean(), before.mean()),
        };
        let difference = mean_after - mean_before;
        let total_agorot = difference * Rational::from_integer(units as i128);
        rows.push(PenaltyRow {
            store_type,
            year_after: after.year,
            year_before: before.year,
            mean_after,
            mean_before,
            difference,
            volume: units,
            total_nis: nis_presentation(&total_agorot)?,
            total_agorot,
        });
    }
    let grand_total_agorot = rows
        .iter()
        .fold(Rational::from_integer(0), |sum, row| sum + row.total_agorot);
    Ok(PenaltyTable {
        price_cap: table_cap.unwrap_or(None),
        mode,
        rows,
        grand_total_nis: nis_presentation(&grand_total_agorot)?,
        grand_total_agorot,
    })
}

/// Load annual unit volumes per store type from a `store_type, units` file.
pub fn load_unit_volumes(path: &Path) -> Result<Vec<(StoreType, u64)>, PenaltyError> {
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
    let mut volumes: Vec<(StoreType, u64)> = Vec::new();
    for result in reader.records() {
        let record = result.map_err(DistError::from)?;
        let line = record_line(&record);
        let token = record.get(0).unwrap_or("").trim();
        let store_type = token
            .parse::<StoreType>()
            .map_err(|_| DistError::UnknownStoreType {
                line,
                token: token.to_string(),
            })?;
        let units: u64 = parse_field(&record, 1, "units")?;
        if volumes.iter().any(|&(existing, _)| existing == store_type) {
            return Err(PenaltyError::DuplicateVolume { line, store_type });
        }
        if units == 0 {
            return Err(PenaltyError::ZeroVolume { line, store_type });
        }
        volumes.push((store_type, units));
    }
    if volumes.is_empty() {
        return Err(PenaltyError::NoVolumes);
    }
    Ok(volumes)
}

/// Whole-NIS presentation of an exact agorot amount, halves away from zero.
fn nis_presentation(agorot: &Rational) -> Result<i64, PenaltyError> {
    let nis = div_round_half_away(*agorot.numer(), agorot.denom() * 100);
    i64::try_from(nis).map_err(|_| PenaltyError::Overflow)
}

fn cap_label(cap: Option<Money>) -> String {
    match cap {
        Some(cap) => cap.to_string(),
        None => "uncapped".to_string(),
    }
}

fn find_unique<'a>(
    stats: &'a [PennyStats],
    store_type: StoreType,
    side: &'static str,
) -> Result<&'a PennyStats, PenaltyError> {
    let mut matches = stats.iter().filter(|s| s.store_type == store_type);
    let first = matches
        .next()
        .ok_or(PenaltyError::MissingGroup { store_type, side })?;
    if matches.next().is_some() {
        return Err(PenaltyError::AmbiguousGroup { store_type, side });
    }
    Ok(first)
}
