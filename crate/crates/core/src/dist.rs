//! Probability inputs for the simulation: price-ending and basket-size
//! distributions per store type, their ingestion from delimited files, and
//! empirical estimation from price observations.
//!
//! Masses are exact rationals parsed from decimal text, so normalization
//! checks are exact and the convolution oracle downstream never sees binary
//! rounding error.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::Datelike;
use num::integer::Integer;
use num::{One, Signed, Zero};
use thiserror::Error;

use crate::money::Money;
use crate::numeric::{parse_decimal, Rational};
use crate::rng::Substream;

/// Absolute tolerance for a single distribution's mass sum.
const MASS_SUM_TOLERANCE: (i128, i128) = (1, 1_000_000_000_000);
/// Absolute tolerance for the profile-set revenue-share sum. Published share
/// tables are rounded to three decimals and often sum to 0.999, so this is
/// deliberately looser than the per-distribution tolerance.
const REVENUE_SUM_TOLERANCE: (i128, i128) = (1, 1_000);

/// Store types of the national FMCG aggregation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StoreType {
    SupermarketsAndDrugstores,
    SmallGroceries,
    ConvenienceStores,
}

/// Fixed presentation and tie-breaking order for store types.
pub const STORE_ORDER: [StoreType; 3] = [
    StoreType::SupermarketsAndDrugstores,
    StoreType::SmallGroceries,
    StoreType::ConvenienceStores,
];

impl StoreType {
    pub const fn as_str(self) -> &'static str {
        match self {
            StoreType::SupermarketsAndDrugstores => "supermarkets_and_drugstores",
            StoreType::SmallGroceries => "small_groceries",
            StoreType::ConvenienceStores => "convenience_stores",
        }
    }

    /// Short label for aligned report columns.
    pub const fn label(self) -> &'static str {
        match self {
            StoreType::SupermarketsAndDrugstores => "supermarkets+drugstores",
            StoreType::SmallGroceries => "small groceries",
            StoreType::ConvenienceStores => "convenience stores",
        }
    }
}

impl FromStr for StoreType {
    type Err = DistError;

    fn from_str(s: &str) -> Result<StoreType, DistError> {
        match s {
            "supermarkets_and_drugstores" => Ok(StoreType::SupermarketsAndDrugstores),
            "small_groceries" => Ok(StoreType::SmallGroceries),
            "convenience_stores" => Ok(StoreType::ConvenienceStores),
            other => Err(DistError::UnknownStoreType {
                token: other.to_string(),
                line: 0,
            }),
        }
    }
}

impl fmt::Display for StoreType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Errors from distribution construction and file ingestion.
#[derive(Debug, Error)]
pub enum DistError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed delimited data: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: field {field}: {detail}")]
    Field { line: u64, field: &'static str, detail: String },
    #[error("line {line}: unknown store type {token:?}")]
    UnknownStoreType { line: u64, token: String },
    #[error("line {line}: unknown row kind {token:?} (expected ending, basket, or meta)")]
    UnknownKind { line: u64, token: String },
    #[error("line {line}: duplicate {kind} index {index} for {store_type}")]
    Duplicate { line: u64, kind: &'static str, index: u32, store_type: StoreType },
    #[error("{store_type}: {kind} distribution not normalized (mass sum = {sum})")]
    NotNormalized { store_type: String, kind: &'static str, sum: String },
    #[error("negative mass {mass} at index {index}")]
    NegativeMass { index: u32, mass: String },
    #[error("ending index {index} out of range for modulus {modulus}")]
    EndingIndexOutOfRange { index: u32, modulus: u32 },
    #[error("basket size {size} out of range (expected 1..=10000)")]
    BasketSizeOutOfRange { size: u32 },
    #[error("unsupported ending modulus {modulus} (expected 5, 10, or 100)")]
    UnsupportedModulus { modulus: u32 },
    #[error("{store_type}: missing meta row (annual transactions, revenue share)")]
    MissingMeta { store_type: StoreType },
    #[error("{store_type}: missing {kind} distribution rows")]
    MissingDistribution { store_type: StoreType, kind: &'static str },
    #[error("{store_type}: annual transaction count must be positive")]
    ZeroTransactions { store_type: StoreType },
    #[error("{store_type}: revenue share {share} outside [0, 1]")]
    RevenueShareOutOfRange { store_type: StoreType, share: String },
    #[error("profile-set revenue shares sum to {sum}, expected 1 within 0.001")]
    RevenueSharesNotNormalized { sum: String },
    #[error("empty observation input")]
    EmptyObservations,
    #[error("negative price {agorot} agorot at line {line}")]
    NegativePrice { line: u64, agorot: i64 },
    #[error("distribution masses too fine-grained to sample (common denominator exceeds 64 bits)")]
    SamplerDenominatorOverflow,
}

fn tolerance(raw: (i128, i128)) -> Rational {
    Rational::new(raw.0, raw.1)
}

fn check_masses(masses: &[Rational], kind: &'static str, owner: &str) -> Result<(), DistError> {
    let mut sum = Rational::zero();
    for (index, mass) in masses.iter().enumerate() {
        if mass.is_negative() {
            return Err(DistError::NegativeMass {
                index: index as u32,
                mass: format!("{mass}"),
            });
        }
        sum += *mass;
    }
    if (sum - Rational::one()).abs() > tolerance(MASS_SUM_TOLERANCE) {
        return Err(DistError::NotNormalized {
            store_type: owner.to_string(),
            kind,
            sum: format!("{sum}"),
        });
    }
    Ok(())
}

/// Probability mass over price-ending residues.
///
/// The canonical view is modulo 100 (the agorot part of a price); the
/// modulo-10 view (last digit) drives Nearest10 simulation and the modulo-5
/// view drives Nearest5. Collapsing is exact and sums class mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndingDistribution {
    masses: Vec<Rational>,
    modulus: u32,
}

impl EndingDistribution {
    pub fn new(masses: Vec<Rational>, modulus: u32) -> Result<EndingDistribution, DistError> {
        if !matches!(modulus, 5 | 10 | 100) {
            return Err(DistError::UnsupportedModulus { modulus });
        }
        if masses.len() != modulus as usize {
            return Err(DistError::UnsupportedModulus { modulus });
        }
        check_masses(&masses, "ending", "distribution")?;
        Ok(EndingDistribution { masses, modulus })
    }

    /// Point mass at a single residue.
    pub fn point_mass(residue: u32, modulus: u32) -> Result<EndingDistribution, DistError> {
        if residue >= modulus {
            return Err(DistError::EndingIndexOutOfRange { index: residue, modulus });
        }
        let mut masses = vec![Rational::zero(); modulus as usize];
        masses[residue as usize] = Rational::one();
        EndingDistribution::new(masses, modulus)
    }

    /// Uniform mass over all residues.
    pub fn uniform(modulus: u32) -> Result<EndingDistribution, DistError> {
        let mass = Rational::new(1, modulus as i128);
        EndingDistribution::new(vec![mass; modulus as usize], modulus)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn mass(&self, residue: u32) -> Rational {
        self.masses[residue as usize]
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    /// Exact collapse to a coarser residue system (100 -> 10, 100 -> 5,
    /// 10 -> 5): class mass is summed, so total mass per residue class is
    /// preserved.
    pub fn collapse(&self, modulus: u32) -> Result<EndingDistribution, DistError> {
        if !matches!(modulus, 5 | 10 | 100) || self.modulus % modulus != 0 {
            return Err(DistError::UnsupportedModulus { modulus });
        }
        let mut masses = vec![Rational::zero(); modulus as usize];
        for (residue, mass) in self.masses.iter().enumerate() {
            masses[residue % modulus as usize] += *mass;
        }
        EndingDistribution::new(masses, modulus)
    }

    /// Sampler over residues for the simulation hot path.
    pub fn sampler(&self) -> Result<DiscreteSampler, DistError> {
        DiscreteSampler::new(&self.masses)
    }
}

/// Probability mass over shopping-basket sizes 1..=K_max.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasketSizeDistribution {
    masses: Vec<Rational>,
}

/// Largest supported basket size.
pub const MAX_BASKET_SIZE: u32 = 10_000;

impl BasketSizeDistribution {
    /// Masses indexed by basket size minus one (index 0 is size 1).
    pub fn new(masses: Vec<Rational>) -> Result<BasketSizeDistribution, DistError> {
        if masses.is_empty() || masses.len() > MAX_BASKET_SIZE as usize {
            return Err(DistError::BasketSizeOutOfRange {
                size: masses.len() as u32,
            });
        }
        check_masses(&masses, "basket", "distribution")?;
        Ok(BasketSizeDistribution { masses })
    }

    pub fn from_pairs(pairs: &[(u32, Rational)]) -> Result<BasketSizeDistribution, DistError> {
        let max = pairs.iter().map(|(k, _)| *k).max().unwrap_or(0);
        if max == 0 || max > MAX_BASKET_SIZE {
            return Err(DistError::BasketSizeOutOfRange { size: max });
        }
        let mut masses = vec![Rational::zero(); max as usize];
        for (size, mass) in pairs {
            if *size == 0 {
                return Err(DistError::BasketSizeOutOfRange { size: 0 });
            }
            masses[(size - 1) as usize] += *mass;
        }
        BasketSizeDistribution::new(masses)
    }

    pub fn point_mass(size: u32) -> Result<BasketSizeDistribution, DistError> {
        BasketSizeDistribution::from_pairs(&[(size, Rational::one())])
    }

    pub fn k_max(&self) -> u32 {
        self.masses.len() as u32
    }

    /// Mass at basket size `size` (zero outside 1..=k_max).
    pub fn mass(&self, size: u32) -> Rational {
        if size == 0 || size > self.k_max() {
            Rational::zero()
        } else {
            self.masses[(size - 1) as usize]
        }
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    /// Smallest size with cumulative mass at least one half.
    pub fn median(&self) -> u32 {
        let mut cumulative = Rational::zero();
        for (index, mass) in self.masses.iter().enumerate() {
            cumulative += *mass;
            if cumulative >= Rational::new(1, 2) {
                return index as u32 + 1;
            }
        }
        self.k_max()
    }

    pub fn sampler(&self) -> Result<DiscreteSampler, DistError> {
        DiscreteSampler::new(&self.masses)
    }
}

/// Inverse-CDF sampler over a fixed finite distribution.
///
/// Cumulative masses are held as exact integer thresholds over the common
/// denominator D, in ascending index order, so draws are seed-reproducible. A
/// 64-bit draw x maps to the value floor(x * D / 2^64); the mapping bias is
/// below D / 2^64 per draw, far under any statistical tolerance used here.
#[derive(Clone, Debug)]
pub struct DiscreteSampler {
    cumulative: Vec<u64>,
    denominator: u64,
}

impl DiscreteSampler {
    pub fn new(masses: &[Rational]) -> Result<DiscreteSampler, DistError> {
        let mut denominator: i128 = 1;
        for mass in masses {
            denominator = denominator.lcm(mass.denom());
            if denominator > u64::MAX as i128 {
                return Err(DistError::SamplerDenominatorOverflow);
            }
        }
        let mut cumulative = Vec::with_capacity(masses.len());
        let mut running: i128 = 0;
        for mass in masses {
            running += mass.numer() * (denominator / mass.denom());
            cumulative.push(running.min(denominator) as u64);
        }
        Ok(DiscreteSampler {
            cumulative,
            denominator: denominator as u64,
        })
    }

    /// Draw an index with the configured probabilities.
    #[inline]
    pub fn draw(&self, rng: &mut Substream) -> usize {
        let x = rng.next_u64();
        let point = ((x as u128 * self.denominator as u128) >> 64) as u64;
        // Distributions here have at most 100 entries; a linear scan in fixed
        // ascending order is both fast and reproducibly ordered.
        for (index, bound) in self.cumulative.iter().enumerate() {
            if point < *bound {
                return index;
            }
        }
        self.cumulative.len() - 1
    }
}

/// Draw a basket size from the distribution. Builds a sampler per call; hot
/// loops should hold a [`BasketSizeDistribution::sampler`] instead.
pub fn sample_basket(dist: &BasketSizeDistribution, rng: &mut Substream) -> Result<u32, DistError> {
    Ok(dist.sampler()?.draw(rng) as u32 + 1)
}

/// Per-store-type simulation inputs.
#[derive(Clone, Debug)]
pub struct StoreProfile {
    pub store_type: StoreType,
    pub endings: EndingDistribution,
    pub baskets: BasketSizeDistribution,
    /// Exact annual transaction count (not thousands).
    pub annual_transactions: u64,
    pub revenue_share: Rational,
}

impl StoreProfile {
    pub fn new(
        store_type: StoreType,
        endings: EndingDistribution,
        baskets: BasketSizeDistribution,
        annual_transactions: u64,
        revenue_share: Rational,
    ) -> Result<StoreProfile, DistError> {
        if annual_transactions == 0 {
            return Err(DistError::ZeroTransactions { store_type });
        }
        if revenue_share.is_negative() || revenue_share > Rational::one() {
            return Err(DistError::RevenueShareOutOfRange {
                store_type,
                share: format!("{revenue_share}"),
            });
        }
        Ok(StoreProfile {
            store_type,
            endings,
            baskets,
            annual_transactions,
            revenue_share,
        })
    }
}

/// Check that a profile set's revenue shares sum to 1 within the documented
/// tolerance (0.001, covering three-decimal rounding of published shares).
pub fn check_revenue_shares(profiles: &[StoreProfile]) -> Result<(), DistError> {
    let mut sum = Rational::zero();
    for profile in profiles {
        sum += profile.revenue_share;
    }
    if (sum - Rational::one()).abs() > tolerance(REVENUE_SUM_TOLERANCE) {
        return Err(DistError::RevenueSharesNotNormalized { sum: format!("{sum}") });
    }
    Ok(())
}

#[derive(Default)]
struct ProfileBuilder {
    endings: BTreeMap<u32, Rational>,
    baskets: BTreeMap<u32, Rational>,
    meta: Option<(u64, Rational)>,
}

pub(crate) fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

pub(crate) fn parse_field<T: FromStr>(
    record: &csv::StringRecord,
    index: usize,
    field: &'static str,
) -> Result<T, DistError> {
    let line = record_line(record);
    let raw = record.get(index).ok_or(DistError::Field {
        line,
        field,
        detail: "missing column".to_string(),
    })?;
    raw.trim().parse::<T>().map_err(|_| DistError::Field {
        line,
        field,
        detail: format!("cannot parse {:?}", raw.trim()),
    })
}

pub(crate) fn parse_mass(
    record: &csv::StringRecord,
    index: usize,
    field: &'static str,
) -> Result<Rational, DistError> {
    let line = record_line(record);
    let raw = record.get(index).ok_or(DistError::Field {
        line,
        field,
        detail: "missing column".to_string(),
    })?;
    parse_decimal(raw).map_err(|e| DistError::Field {
        line,
        field,
        detail: e.to_string(),
    })
}

/// Load store profiles from the delimited profile schema:
/// `store_type, kind(ending|basket), index, mass` rows plus one
/// `store_type, meta, annual_transactions, revenue_share` row per store type.
/// Lines starting with `#` are comments. Ending masses may be sparse; missing
/// residues carry zero mass.
pub fn load_profiles(path: &Path) -> Result<Vec<StoreProfile>, DistError> {
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

    let mut builders: BTreeMap<StoreType, ProfileBuilder> = BTreeMap::new();
    for result in reader.records() {
        let record = result?;
        let line = record_line(&record);
        let store_token = record.get(0).unwrap_or("").trim();
        let store_type = store_token
            .parse::<StoreType>()
            .map_err(|_| DistError::UnknownStoreType {
                line,
                token: store_token.to_string(),
            })?;
        let builder = builders.entry(store_type).or_default();
        let kind = record.get(1).unwrap_or("").trim();
        match kind {
            "ending" => {
                let index: u32 = parse_field(&record, 2, "index")?;
                if index >= 100 {
                    return Err(DistError::EndingIndexOutOfRange { index, modulus: 100 });
                }
                let mass = parse_mass(&record, 3, "mass")?;
                if builder.endings.contains_key(&index) {
                    return Err(DistError::Duplicate {
                        line,
                        kind: "ending",
                        index,
                        store_type,
                    });
                }
                builder.endings.insert(index, mass);
            }
            "basket" => {
                let index: u32 = parse_field(&record, 2, "index")?;
                if index == 0 || index > MAX_BASKET_SIZE {
                    return Err(DistError::BasketSizeOutOfRange { size: index });
                }
                let mass = parse_mass(&record, 3, "mass")?;
                if builder.baskets.contains_key(&index) {
                    return Err(DistError::Duplicate {
                        line,
                        kind: "basket",
                        index,
                        store_type,
                    });
                }
                builder.baskets.insert(index, mass);
            }
            "meta" => {
                let transactions: u64 = parse_field(&record, 2, "annual_transactions")?;
                let share = parse_mass(&record, 3, "revenue_share")?;
                builder.meta = Some((transactions, share));
            }
            other => {
                return Err(DistError::UnknownKind {
                    line,
                    token: other.to_string(),
                })
            }
        }
    }

    let mut profiles = Vec::new();
    for store_type in STORE_ORDER {
        let Some(builder) = builders.remove(&store_type) else {
            continue;
        };
        if builder.endings.is_empty() {
            return Err(DistError::MissingDistribution { store_type, kind: "ending" });
        }
        if builder.baskets.is_empty() {
            return Err(DistError::MissingDistribution { store_type, kind: "basket" });
        }
        let (transactions, share) =
            builder.meta.ok_or(DistError::MissingMeta { store_type })?;
        let mut ending_masses = vec![Rational::zero(); 100];
        for (index, mass) in &builder.endings {
            ending_masses[*index as usize] = *mass;
        }
        let endings = EndingDistribution::new(ending_masses, 100).map_err(|e| match e {
            DistError::NotNormalized { kind, sum, .. } => DistError::NotNormalized {
                store_type: store_type.to_string(),
                kind,
                sum,
            },
            other => other,
        })?;
        let basket_pairs: Vec<(u32, Rational)> =
            builder.baskets.iter().map(|(k, m)| (*k, *m)).collect();
        let baskets = BasketSizeDistribution::from_pairs(&basket_pairs).map_err(|e| match e {
            DistError::NotNormalized { kind, sum, .. } => DistError::NotNormalized {
                store_type: store_type.to_string(),
                kind,
                sum,
            },
            other => other,
        })?;
        profiles.push(StoreProfile::new(store_type, endings, baskets, transactions, share)?);
    }
    check_revenue_shares(&profiles)?;
    Ok(profiles)
}

/// One observed posted price.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceObservation {
    pub store_id: u64,
    pub store_type: StoreType,
    pub product_id: u64,
    pub date: chrono::NaiveDate,
    pub price: Money,
}

impl PriceObservation {
    pub fn year(&self) -> i32 {
        self.date.year()
    }
}

/// Load price observations from the delimited schema
/// `store_id, store_type, product_id, date(ISO-8601), price_agorot`.
pub fn load_observations(path: &Path) -> Result<Vec<PriceObservation>, DistError> {
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
    let mut observations = Vec::new();
    for result in reader.records() {
        let record = result?;
        let line = record_line(&record);
        let store_id: u64 = parse_field(&record, 0, "store_id")?;
        let store_token = record.get(1).unwrap_or("").trim();
        let store_type = store_token
            .parse::<StoreType>()
            .map_err(|_| DistError::UnknownStoreType {
                line,
                token: store_token.to_string(),
            })?;
        let product_id: u64 = parse_field(&record, 2, "product_id")?;
        let date: chrono::NaiveDate = parse_field(&record, 3, "date")?;
        let agorot: i64 = parse_field(&record, 4, "price_agorot")?;
        if agorot < 0 {
            return Err(DistError::NegativePrice { line, agorot });
        }
        observations.push(PriceObservation {
            store_id,
            store_type,
            product_id,
            date,
            price: Money::from_agorot(agorot),
        });
    }
    if observations.is_empty() {
        return Err(DistError::EmptyObservations);
    }
    Ok(observations)
}

/// Empirical ending distribution of a set of prices:
/// mass[r] = count(price mod modulus = r) / N, exact.
pub fn empirical_ending_distribution(
    observations: &[PriceObservation],
    modulus: u32,
) -> Result<EndingDistribution, DistError> {
    empirical_from_prices(observations.iter().map(|o| o.price), modulus)
}

/// Empirical ending distribution from raw prices.
pub fn empirical_from_prices(
    prices: impl IntoIterator<Item = Money>,
    modulus: u32,
) -> Result<EndingDistribution, DistError> {
    if !matches!(modulus, 10 | 100) {
        return Err(DistError::UnsupportedModulus { modulus });
    }
    let mut counts = vec![0u64; modulus as usize];
    let mut total = 0u64;
    for price in prices {
        counts[(price.agorot().rem_euclid(modulus as i64)) as usize] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(DistError::EmptyObservations);
    }
    let masses = counts
        .iter()
        .map(|c| Rational::new(*c as i128, total as i128))
        .collect();
    EndingDistribution::new(masses, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Substream, DOMAIN_TRANSACTIONS};
    use std::io::Write;

    fn money(a: i64) -> Money {
        Money::from_agorot(a)
    }

    #[test]
    fn empirical_examples() {
        // {990, 990, 1000, 1190}: every last digit is 0; mod 100 separates 90s.
        let prices = [money(990), money(990), money(1000), money(1190)];
        let mod10 = empirical_from_prices(prices, 10).unwrap();
        assert_eq!(mod10.mass(0), Rational::one());
        let mod100 = empirical_from_prices(prices, 100).unwrap();
        assert_eq!(mod100.mass(90), Rational::new(3, 4));
        assert_eq!(mod100.mass(0), Rational::new(1, 4));

        let single = empirical_from_prices([money(1999)], 100).unwrap();
        assert_eq!(single.mass(99), Rational::one());

        let uniform = empirical_from_prices((0..100).map(money), 100).unwrap();
        for r in 0..100 {
            assert_eq!(uniform.mass(r), Rational::new(1, 100));
        }
    }

    #[test]
    fn empty_observations_rejected() {
        assert!(matches!(
            empirical_from_prices(std::iter::empty(), 100),
            Err(DistError::EmptyObservations)
        ));
    }

    #[test]
    fn collapse_preserves_class_mass() {
        let mut masses = vec![Rational::zero(); 100];
        masses[99] = Rational::new(611, 1000);
        masses[40] = Rational::new(183, 1000);
        masses[7] = Rational::new(206, 1000);
        let dist = EndingDistribution::new(masses, 100).unwrap();
        let collapsed = dist.collapse(10).unwrap();
        assert_eq!(collapsed.mass(9), Rational::new(611, 1000));
        assert_eq!(collapsed.mass(0), Rational::new(183, 1000));
        assert_eq!(collapsed.mass(7), Rational::new(206, 1000));
        // Estimate-then-collapse equals collapse-then-estimate.
        let prices = [money(999), money(990), money(1009), money(900)];
        let via_100 = empirical_from_prices(prices, 100).unwrap().collapse(10).unwrap();
        let via_10 = empirical_from_prices(prices, 10).unwrap();
        assert_eq!(via_100, via_10);
    }

    #[test]
    fn sampler_respects_point_mass() {
        let dist = BasketSizeDistribution::point_mass(1).unwrap();
        let sampler = dist.sampler().unwrap();
        let mut rng = Substream::new(11, DOMAIN_TRANSACTIONS, 0);
        for _ in 0..100 {
            assert_eq!(sampler.draw(&mut rng), 0);
        }
    }

    #[test]
    fn sampler_matches_half_half_masses() {
        let dist = BasketSizeDistribution::from_pairs(&[
            (1, Rational::new(1, 2)),
            (2, Rational::new(1, 2)),
        ])
        .unwrap();
        let sampler = dist.sampler().unwrap();
        let n = 1_000_000u64;
        let mut ones = 0u64;
        for t in 0..n {
            let mut rng = Substream::new(5, DOMAIN_TRANSACTIONS, t);
            if sampler.draw(&mut rng) == 0 {
                ones += 1;
            }
        }
        // Binomial 3-sigma bound at p = 1/2, n = 1e6 is 0.0015; spec allows 0.002.
        let share = ones as f64 / n as f64;
        assert!((share - 0.5).abs() < 0.002, "share {share}");
    }

    #[test]
    fn empirical_converges_in_total_variation() {
        let mut masses = vec![Rational::zero(); 100];
        masses[99] = Rational::new(1, 2);
        masses[90] = Rational::new(3, 10);
        masses[0] = Rational::new(1, 5);
        let dist = EndingDistribution::new(masses, 100).unwrap();
        let sampler = dist.sampler().unwrap();
        let n = 1_000_000u64;
        let mut counts = vec![0u64; 100];
        for t in 0..n {
            let mut rng = Substream::new(21, DOMAIN_TRANSACTIONS, t);
            counts[sampler.draw(&mut rng)] += 1;
        }
        let empirical =
            empirical_from_prices(counts.iter().enumerate().flat_map(|(r, c)| {
                std::iter::repeat_n(money(r as i64), *c as usize)
            }), 100)
            .unwrap();
        let mut tv = Rational::zero();
        for r in 0..100 {
            tv += (empirical.mass(r) - dist.mass(r)).abs();
        }
        let tv = *tv.numer() as f64 / *tv.denom() as f64 / 2.0;
        assert!(tv <= 0.01, "total variation {tv}");
    }

    #[test]
    fn basket_median_and_mass() {
        let dist = BasketSizeDistribution::from_pairs(&[
            (1, Rational::new(3, 10)),
            (2, Rational::new(2, 10)),
            (3, Rational::new(5, 10)),
        ])
        .unwrap();
        // Cumulative mass reaches exactly one half at size 2.
        assert_eq!(dist.median(), 2);
        assert_eq!(dist.mass(2), Rational::new(2, 10));
        assert_eq!(dist.mass(9), Rational::zero());
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file.flush().unwrap();
        file
    }

    #[test]
    fn profile_roundtrip() {
        let file = write_temp(
            "store_type,kind,index,mass\n\
             # comment line\n\
             supermarkets_and_drugstores,ending,99,0.6\n\
             supermarkets_and_drugstores,ending,0,0.4\n\
             supermarkets_and_drugstores,basket,1,1.0\n\
             supermarkets_and_drugstores,meta,1000,0.5\n\
             small_groceries,ending,90,1.0\n\
             small_groceries,basket,2,1.0\n\
             small_groceries,meta,500,0.3\n\
             convenience_stores,ending,0,1.0\n\
             convenience_stores,basket,1,0.5\n\
             convenience_stores,basket,3,0.5\n\
             convenience_stores,meta,200,0.2\n",
        );
        let profiles = load_profiles(file.path()).unwrap();
        assert_eq!(profiles.len(), 3);
        assert_eq!(profiles[0].store_type, StoreType::SupermarketsAndDrugstores);
        assert_eq!(profiles[0].endings.mass(99), Rational::new(3, 5));
        assert_eq!(profiles[0].annual_transactions, 1000);
        assert_eq!(profiles[2].baskets.mass(3), Rational::new(1, 2));
    }

    #[test]
    fn profile_rejects_unnormalized_masses() {
        let file = write_temp(
            "store_type,kind,index,mass\n\
             small_groceries,ending,99,0.5\n\
             small_groceries,ending,0,0.48\n\
             small_groceries,basket,1,1.0\n\
             small_groceries,meta,10,1.0\n",
        );
        let err = load_profiles(file.path()).unwrap_err();
        assert!(
            matches!(err, DistError::NotNormalized { kind: "ending", .. }),
            "unexpected error {err}"
        );
    }

    #[test]
    fn profile_rejects_unknown_store_type() {
        let file = write_temp(
            "store_type,kind,index,mass\n\
             kiosks,ending,0,1.0\n",
        );
        let err = load_profiles(file.path()).unwrap_err();
        match err {
            DistError::UnknownStoreType { line, token } => {
                assert_eq!(line, 2);
                assert_eq!(token, "kiosks");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn profile_requires_meta() {
        let file = write_temp(
            "store_type,kind,index,mass\n\
             convenience_stores,ending,0,1.0\n\
             convenience_stores,basket,1,1.0\n",
        );
        let err = load_profiles(file.path()).unwrap_err();
        assert!(matches!(err, DistError::MissingMeta { .. }), "unexpected error {err}");
    }

    #[test]
    fn shipped_calibration_file_loads() {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data/profiles_fmcg_2013.csv");
        let profiles = load_profiles(&path).unwrap();
        assert_eq!(profiles.len(), 3);
        let supers = &profiles[0];
        assert_eq!(supers.endings.mass(99), Rational::new(611, 10_000));
        assert_eq!(supers.endings.collapse(10).unwrap().mass(9), Rational::new(611, 1_000));
        assert_eq!(supers.endings.collapse(10).unwrap().mass(0), Rational::new(183, 1_000));
        assert_eq!(supers.baskets.mass(1), Rational::new(136, 1_000));
        assert_eq!(supers.baskets.median(), 6);
        let tail: Rational = (15..=supers.baskets.k_max())
            .map(|k| supers.baskets.mass(k))
            .sum();
        assert_eq!(tail, Rational::new(1, 4));
        assert_eq!(supers.annual_transactions, 188_856_000);
        let small = &profiles[1];
        assert_eq!(small.baskets.median(), 3);
        let convenience = &profiles[2];
        assert_eq!(convenience.baskets.mass(1), Rational::new(71, 100));
        assert_eq!(convenience.baskets.median(), 1);
        assert_eq!(convenience.endings.collapse(10).unwrap().mass(9), Rational::new(342, 1_000));
    }

    #[test]
    fn observation_file_roundtrip() {
        let file = write_temp(
            "store_id,store_type,product_id,date,price_agorot\n\
             1,small_groceries,42,2013-05-14,999\n\
             2,convenience_stores,7,2021-01-03,1290\n",
        );
        let observations = load_observations(file.path()).unwrap();
        assert_eq!(observations.len(), 2);
        assert_eq!(observations[0].year(), 2013);
        assert_eq!(observations[0].price, money(999));
        assert_eq!(observations[1].store_type, StoreType::ConvenienceStores);
    }

    #[test]
    fn observation_file_rejects_negative_price() {
        let file = write_temp(
            "store_id,store_type,product_id,date,price_agorot\n\
             1,small_groceries,42,2013-05-14,-5\n",
        );
        let err = load_observations(file.path()).unwrap_err();
        assert!(matches!(err, DistError::NegativePrice { line: 2, agorot: -5 }));
    }

    #[test]
    fn convenience_singleton_share_empirical() {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data/profiles_fmcg_2013.csv");
        let profiles = load_profiles(&path).unwrap();
        let convenience = &profiles[2];
        let sampler = convenience.baskets.sampler().unwrap();
        let n = 200_000u64;
        let mut singles = 0u64;
        for t in 0..n {
            let mut rng = Substream::new(3, DOMAIN_TRANSACTIONS, t);
            if sampler.draw(&mut rng) == 0 {
                singles += 1;
            }
        }
        let share = singles as f64 / n as f64;
        assert!((share - 0.710).abs() < 0.004, "singleton share {share}");
    }
}
