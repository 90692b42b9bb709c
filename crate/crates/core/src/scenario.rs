//! National aggregation of per-transaction rounding taxes under cash-share
//! scenarios, including the revenue-constrained extremes.
//!
//! A scenario assigns each store type a cash-transaction share s in [0, 1];
//! the national total is the sum of per-store tax x transactions x share.
//! The extreme scenarios maximize or minimize that total subject to a fixed
//! revenue-weighted aggregate cash share, a one-constraint linear program
//! solved exactly by greedy fractional knapsack.

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

use crate::dist::{parse_field, parse_mass, record_line, DistError, StoreProfile, StoreType};
use crate::numeric::{big_ratio_round_half_away, to_big, Rational};

/// Absolute tolerance for the revenue-weighted aggregate constraint.
const AGGREGATE_TOLERANCE: (i128, i128) = (1, 1_000_000_000);

/// Errors from scenario construction and aggregation.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("{store_type}: cash share {share} outside [0, 1]")]
    ShareOutOfRange { store_type: StoreType, share: String },
    #[error("revenue-weighted aggregate {actual} differs from target {target} by more than 1e-9")]
    AggregateMismatch { actual: String, target: String },
    #[error("aggregate target {target} outside [0, 1]")]
    TargetOutOfRange { target: String },
    #[error("aggregate target {target} exceeds the feasible maximum {maximum}")]
    InfeasibleTarget { target: String, maximum: String },
    #[error("store type {store_type} missing from {input}")]
    MissingStore { store_type: StoreType, input: &'static str },
    #[error("no store profiles given")]
    EmptyProfiles,
    #[error("share arithmetic exceeded the 128-bit rational range")]
    NumericOverflow,
}

/// Per-store cash-transaction share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CashShare {
    pub store_type: StoreType,
    pub share: Rational,
}

/// A cash-share assignment whose revenue-weighted aggregate matches a target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CashShareScenario {
    pub shares: Vec<CashShare>,
    pub aggregate_target: Rational,
}

impl CashShareScenario {
    /// Scenario with the same share in every store type. The aggregate
    /// target is derived as share x (sum of revenue shares), so the
    /// constraint holds exactly even when published revenue shares sum to
    /// slightly less than 1.
    pub fn uniform(profiles: &[StoreProfile], share: Rational) -> Result<CashShareScenario, ScenarioError> {
        if profiles.is_empty() {
            return Err(ScenarioError::EmptyProfiles);
        }
        check_share_range(profiles[0].store_type, share)?;
        let mut aggregate = Rational::zero();
        for profile in profiles {
            aggregate += profile.revenue_share * share;
        }
        Ok(CashShareScenario {
            shares: profiles
                .iter()
                .map(|p| CashShare {
                    store_type: p.store_type,
                    share,
                })
                .collect(),
            aggregate_target: aggregate,
        })
    }

    /// Scenario with explicit per-store shares, validated against the target.
    pub fn new(
        profiles: &[StoreProfile],
        shares: &[CashShare],
        aggregate_target: Rational,
    ) -> Result<CashShareScenario, ScenarioError> {
        if profiles.is_empty() {
            return Err(ScenarioError::EmptyProfiles);
        }
        let mut aligned = Vec::with_capacity(profiles.len());
        let mut aggregate = Rational::zero();
        for profile in profiles {
            let share = shares
                .iter()
                .find(|s| s.store_type == profile.store_type)
                .ok_or(ScenarioError::MissingStore {
                    store_type: profile.store_type,
                    input: "cash shares",
                })?
                .share;
            check_share_range(profile.store_type, share)?;
            aggregate += profile.revenue_share * share;
            aligned.push(CashShare {
                store_type: profile.store_type,
                share,
            });
        }
        if (aggregate - aggregate_target).abs() > Rational::new(AGGREGATE_TOLERANCE.0, AGGREGATE_TOLERANCE.1) {
            return Err(ScenarioError::AggregateMismatch {
                actual: format!("{aggregate}"),
                target: format!("{aggregate_target}"),
            });
        }
        Ok(CashShareScenario {
            shares: aligned,
            aggregate_target,
        })
    }

    fn share_for(&self, store_type: StoreType) -> Result<Rational, ScenarioError> {
        self.shares
            .iter()
            .find(|s| s.store_type == store_type)
            .map(|s| s.share)
            .ok_or(ScenarioError::MissingStore {
                store_type,
                input: "cash shares",
            })
    }
}

fn check_share_range(store_type: StoreType, share: Rational) -> Result<(), ScenarioError> {
    if share.is_negative() || share > Rational::one() {
        return Err(ScenarioError::ShareOutOfRange {
            store_type,
            share: format!("{share}"),
        });
    }
    Ok(())
}

/// Measured average rounding tax per transaction for one store type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvgTax {
    pub store_type: StoreType,
    /// Expected transfer per transaction in agorot (may be fractional).
    pub tax_agorot: Rational,
}

/// Load per-store average taxes from the delimited schema
/// `store_type, avg_tax_nis`. Lines starting with `#` are comments.
pub fn load_avg_taxes(path: &std::path::Path) -> Result<Vec<AvgTax>, ScenarioError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| {
            ScenarioError::Dist(match e.kind() {
                csv::ErrorKind::Io(_) => DistError::Io {
                    path: path.to_path_buf(),
                    source: std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()),
                },
                _ => DistError::Csv(e),
            })
        })?;
    let mut taxes = Vec::new();
    for result in reader.records() {
        let record = result.map_err(DistError::Csv)?;
        let line = record_line(&record);
        let store_type: StoreType = parse_field(&record, 0, "store_type").map_err(|_| {
            DistError::UnknownStoreType {
                line,
                token: record.get(0).unwrap_or("").to_string(),
            }
        })?;
        let nis = parse_mass(&record, 1, "avg_tax_nis").map_err(ScenarioError::Dist)?;
        taxes.push(AvgTax {
            store_type,
            tax_agorot: nis * Rational::from_integer(100),
        });
    }
    Ok(taxes)
}

fn tax_for(taxes: &[AvgTax], store_type: StoreType) -> Result<Rational, ScenarioError> {
    taxes
        .iter()
        .find(|t| t.store_type == store_type)
        .map(|t| t.tax_agorot)
        .ok_or(ScenarioError::MissingStore {
            store_type,
            input: "average taxes",
        })
}

/// One aggregated row of the national tax table.
#[derive(Clone, Debug, PartialEq)]
pub struct TaxTableRow {
    pub store_type: StoreType,
    pub tax_agorot: Rational,
    pub annual_transactions: u64,
    pub cash_share: Rational,
    /// Exact total: tax x transactions x share, in agorot.
    pub total_agorot: BigRational,
}

impl TaxTableRow {
    /// Total in whole NIS for presentation (half away from zero).
    pub fn total_nis_whole(&self) -> BigInt {
        big_ratio_round_half_away(&(self.total_agorot.clone() / BigRational::from_integer(BigInt::from(100))))
    }
}

/// National rounding-tax totals under one cash-share scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct TaxTable {
    pub rows: Vec<TaxTableRow>,
    pub grand_total_agorot: BigRational,
}

impl TaxTable {
    /// Grand total in whole NIS for presentation (half away from zero).
    pub fn grand_total_nis_whole(&self) -> BigInt {
        big_ratio_round_half_away(&(self.grand_total_agorot.clone() / BigRational::from_integer(BigInt::from(100))))
    }
}

/// Aggregate per-store taxes into national totals under a scenario.
///
/// Totals stay exact rationals; rounding to whole NIS happens only in the
/// presentation accessors.
pub fn total_tax(
    profiles: &[StoreProfile],
    taxes: &[AvgTax],
    scenario: &CashShareScenario,
) -> Result<TaxTable, ScenarioError> {
    if profiles.is_empty() {
        return Err(ScenarioError::EmptyProfiles);
    }
    let mut rows = Vec::with_capacity(profiles.len());
    let mut grand = BigRational::zero();
    for profile in profiles {
        let tax = tax_for(taxes, profile.store_type)?;
        let share = scenario.share_for(profile.store_type)?;
        let total = to_big(&tax)
            * BigRational::from_integer(BigInt::from(profile.annual_transactions))
            * to_big(&share);
        grand += &total;
        rows.push(TaxTableRow {
            store_type: profile.store_type,
            tax_agorot: tax,
            annual_transactions: profile.annual_transactions,
            cash_share: share,
            total_agorot: total,
        });
    }
    Ok(TaxTable {
        rows,
        grand_total_agorot: grand,
    })
}

/// The maximizing and minimizing scenarios for one aggregate target.
#[derive(Clone, Debug)]
pub struct ExtremeScenarios {
    pub max: (CashShareScenario, TaxTable),
    pub min: (CashShareScenario, TaxTable),
}

/// Solve for the cash-share scenarios that maximize and minimize the national
/// total subject to the revenue-weighted aggregate constraint.
///
/// The program maximizes (minimizes) sum of value_i x s_i with
/// value_i = tax_i x transactions_i, subject to
/// sum of revenue_share_i x s_i = target and s_i in [0, 1]. The greedy
/// fractional-knapsack solution saturates stores in descending (ascending)
/// order of value_i / revenue_share_i, leaving at most one fractional share.
/// Ties are broken by the fixed store-type order. A store with zero revenue
/// weight consumes no budget: the maximum saturates it whenever its value is
/// positive and the minimum leaves it at zero.
pub fn extreme_scenarios(
    profiles: &[StoreProfile],
    taxes: &[AvgTax],
    target: Rational,
) -> Result<ExtremeScenarios, ScenarioError> {
    if profiles.is_empty() {
        return Err(ScenarioError::EmptyProfiles);
    }
    if target.is_negative() || target > Rational::one() {
        return Err(ScenarioError::TargetOutOfRange {
            target: format!("{target}"),
        });
    }
    let mut capacity = Rational::zero();
    for profile in profiles {
        capacity += profile.revenue_share;
    }
    if target > capacity {
        return Err(ScenarioError::InfeasibleTarget {
            target: format!("{target}"),
            maximum: format!("{capacity}"),
        });
    }
    let values: Vec<BigRational> = profiles
        .iter()
        .map(|p| {
            Ok(to_big(&tax_for(taxes, p.store_type)?)
                * BigRational::from_integer(BigInt::from(p.annual_transactions)))
        })
        .collect::<Result<_, ScenarioError>>()?;

    let max = solve(profiles, taxes, &values, target, true)?;
    let min = solve(profiles, taxes, &values, target, false)?;
    Ok(ExtremeScenarios { max, min })
}

fn solve(
    profiles: &[StoreProfile],
    taxes: &[AvgTax],
    values: &[BigRational],
    target: Rational,
    maximize: bool,
) -> Result<(CashShareScenario, TaxTable), ScenarioError> {
    let mut order: Vec<usize> = (0..profiles.len()).collect();
    order.sort_by(|&a, &b| {
        // Compare value_a / weight_a with value_b / weight_b by cross
        // multiplication, which also ranks zero-weight positive-value stores
        // above every finite ratio. Equal ratios keep index order, which is
        // the fixed store-type order for loaded profile sets.
        let left = &values[a] * to_big(&profiles[b].revenue_share);
        let right = &values[b] * to_big(&profiles[a].revenue_share);
        let ratio_order = left.cmp(&right);
        let ranked = if maximize { ratio_order.reverse() } else { ratio_order };
        ranked.then(a.cmp(&b))
    });

    let mut shares = vec![Rational::zero(); profiles.len()];
    let mut budget = to_big(&target);
    for &i in &order {
        let weight = profiles[i].revenue_share;
        if weight.is_zero() {
            shares[i] = if maximize && values[i].is_positive() {
                Rational::one()
            } else {
                Rational::zero()
            };
            continue;
        }
        if budget.is_zero() {
            continue;
        }
        let weight_big = to_big(&weight);
        if budget >= weight_big {
            shares[i] = Rational::one();
            budget -= weight_big;
        } else {
            let fraction = &budget / &weight_big;
            shares[i] = rational_from_big(&fraction)?;
            budget = BigRational::zero();
        }
    }

    let share_list: Vec<CashShare> = profiles
        .iter()
        .zip(&shares)
        .map(|(p, s)| CashShare {
            store_type: p.store_type,
            share: *s,
        })
        .collect();
    let scenario = CashShareScenario::new(profiles, &share_list, target)?;
    let table = total_tax(profiles, taxes, &scenario)?;
    Ok((scenario, table))
}

fn rational_from_big(value: &BigRational) -> Result<Rational, ScenarioError> {
    let numer = i128::try_from(value.numer()).map_err(|_| ScenarioError::NumericOverflow)?;
    let denom = i128::try_from(value.denom()).map_err(|_| ScenarioError::NumericOverflow)?;
    Ok(Rational::new(numer, denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{load_profiles, BasketSizeDistribution, EndingDistribution};

    fn calibration() -> (Vec<StoreProfile>, Vec<AvgTax>) {
        let base = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
        let profiles = load_profiles(&base.join("profiles_fmcg_2013.csv")).unwrap();
        let taxes = load_avg_taxes(&base.join("avg_taxes_2013.csv")).unwrap();
        (profiles, taxes)
    }

    fn toy_profile(store_type: StoreType, transactions: u64, revenue_share: Rational) -> StoreProfile {
        StoreProfile::new(
            store_type,
            EndingDistribution::point_mass(0, 10).unwrap(),
            BasketSizeDistribution::point_mass(1).unwrap(),
            transactions,
            revenue_share,
        )
        .unwrap()
    }

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn loads_average_taxes() {
        let (_, taxes) = calibration();
        assert_eq!(taxes[0].tax_agorot, Rational::new(3, 4));
        assert_eq!(taxes[1].tax_agorot, Rational::new(29, 50));
        assert_eq!(taxes[2].tax_agorot, Rational::new(12, 25));
    }

    #[test]
    fn single_store_direct_multiplication() {
        let profiles = vec![toy_profile(StoreType::SmallGroceries, 1_000, Rational::one())];
        let taxes = vec![AvgTax {
            store_type: StoreType::SmallGroceries,
            tax_agorot: Rational::one(),
        }];
        let scenario = CashShareScenario::uniform(&profiles, Rational::one()).unwrap();
        let table = total_tax(&profiles, &taxes, &scenario).unwrap();
        // 1 agora x 1000 transactions x share 1 = 1000 agorot = NIS 10.
        assert_eq!(table.grand_total_agorot, big(1000, 1));
        assert_eq!(table.grand_total_nis_whole(), BigInt::from(10));
    }

    #[test]
    fn zero_shares_pay_nothing() {
        let (profiles, taxes) = calibration();
        let scenario = CashShareScenario::uniform(&profiles, Rational::zero()).unwrap();
        let table = total_tax(&profiles, &taxes, &scenario).unwrap();
        assert!(table.grand_total_agorot.is_zero());
    }

    #[test]
    fn calibration_equal_shares() {
        let (profiles, taxes) = calibration();
        let scenario = CashShareScenario::uniform(&profiles, Rational::new(1, 4)).unwrap();
        // Revenue shares sum to 0.999, so the derived aggregate is 0.24975.
        assert_eq!(scenario.aggregate_target, Rational::new(999, 4000));
        let table = total_tax(&profiles, &taxes, &scenario).unwrap();
        assert_eq!(table.rows[0].total_agorot, big(35_410_500, 1));
        assert_eq!(table.rows[1].total_agorot, big(14_329_190, 1));
        assert_eq!(table.rows[2].total_agorot, big(942_720, 1));
        assert_eq!(table.grand_total_agorot, big(50_682_410, 1));
        assert_eq!(table.rows[0].total_nis_whole(), BigInt::from(354_105));
        assert_eq!(table.rows[1].total_nis_whole(), BigInt::from(143_292));
        assert_eq!(table.rows[2].total_nis_whole(), BigInt::from(9_427));
        assert_eq!(table.grand_total_nis_whole(), BigInt::from(506_824));
    }

    #[test]
    fn calibration_extremes() {
        let (profiles, taxes) = calibration();
        let extremes = extreme_scenarios(&profiles, &taxes, Rational::new(1, 4)).unwrap();
        let (max_scenario, max_table) = &extremes.max;
        // Ratios value/weight rank convenience > small > supermarkets, so the
        // maximum saturates the two small categories and puts the remaining
        // budget 0.25 - 0.161 = 0.089 on supermarkets: share 89/838.
        assert_eq!(max_scenario.shares[0].share, Rational::new(89, 838));
        assert_eq!(max_scenario.shares[1].share, Rational::one());
        assert_eq!(max_scenario.shares[2].share, Rational::one());
        let expected_max = big(141_642_000, 1) * big(89, 838) + big(57_316_760, 1) + big(3_770_880, 1);
        assert_eq!(max_table.grand_total_agorot, expected_max);

        let (min_scenario, min_table) = &extremes.min;
        // The minimum fills the whole budget with supermarkets: 0.25/0.838.
        assert_eq!(min_scenario.shares[0].share, Rational::new(125, 419));
        assert_eq!(min_scenario.shares[1].share, Rational::zero());
        assert_eq!(min_scenario.shares[2].share, Rational::zero());
        let expected_min = big(141_642_000, 1) * big(125, 419);
        assert_eq!(min_table.grand_total_agorot, expected_min);

        // Vertex property: at most one share strictly inside (0, 1).
        for scenario in [max_scenario, min_scenario] {
            let fractional = scenario
                .shares
                .iter()
                .filter(|s| s.share > Rational::zero() && s.share < Rational::one())
                .count();
            assert!(fractional <= 1);
        }

        // Baseline sits between the extremes.
        let baseline = total_tax(
            &profiles,
            &taxes,
            &CashShareScenario::uniform(&profiles, Rational::new(1, 4)).unwrap(),
        )
        .unwrap();
        assert!(min_table.grand_total_agorot <= baseline.grand_total_agorot);
        assert!(baseline.grand_total_agorot <= max_table.grand_total_agorot);
    }

    #[test]
    fn two_store_vertices() {
        let profiles = vec![
            toy_profile(StoreType::SupermarketsAndDrugstores, 1, Rational::new(1, 2)),
            toy_profile(StoreType::SmallGroceries, 1, Rational::new(1, 2)),
        ];
        let taxes = vec![
            AvgTax {
                store_type: StoreType::SupermarketsAndDrugstores,
                tax_agorot: Rational::one(),
            },
            AvgTax {
                store_type: StoreType::SmallGroceries,
                tax_agorot: Rational::zero(),
            },
        ];
        let extremes = extreme_scenarios(&profiles, &taxes, Rational::new(1, 2)).unwrap();
        assert_eq!(extremes.max.0.shares[0].share, Rational::one());
        assert_eq!(extremes.max.0.shares[1].share, Rational::zero());
        assert_eq!(extremes.min.0.shares[0].share, Rational::zero());
        assert_eq!(extremes.min.0.shares[1].share, Rational::one());
        assert_eq!(extremes.max.1.grand_total_agorot, big(1, 1));
        assert!(extremes.min.1.grand_total_agorot.is_zero());
    }

    #[test]
    fn identical_ratios_are_degenerate() {
        // Equal value/weight ratios make every feasible scenario equivalent.
        let profiles = vec![
            toy_profile(StoreType::SupermarketsAndDrugstores, 600, Rational::new(3, 5)),
            toy_profile(StoreType::SmallGroceries, 400, Rational::new(2, 5)),
        ];
        let taxes = vec![
            AvgTax {
                store_type: StoreType::SupermarketsAndDrugstores,
                tax_agorot: Rational::one(),
            },
            AvgTax {
                store_type: StoreType::SmallGroceries,
                tax_agorot: Rational::one(),
            },
        ];
        let extremes = extreme_scenarios(&profiles, &taxes, Rational::new(1, 2)).unwrap();
        assert_eq!(
            extremes.max.1.grand_total_agorot,
            extremes.min.1.grand_total_agorot
        );
        let baseline = total_tax(
            &profiles,
            &taxes,
            &CashShareScenario::uniform(&profiles, Rational::new(1, 2)).unwrap(),
        )
        .unwrap();
        assert_eq!(extremes.max.1.grand_total_agorot, baseline.grand_total_agorot);
    }

    #[test]
    fn greedy_matches_grid_search() {
        // A three-store instance whose objective gradient per 0.001 grid step
        // stays under NIS 1, so the grid optimum brackets the exact one.
        let profiles = vec![
            toy_profile(StoreType::SupermarketsAndDrugstores, 30_000, Rational::new(1, 2)),
            toy_profile(StoreType::SmallGroceries, 20_000, Rational::new(3, 10)),
            toy_profile(StoreType::ConvenienceStores, 10_000, Rational::new(1, 5)),
        ];
        let taxes = vec![
            AvgTax {
                store_type: StoreType::SupermarketsAndDrugstores,
                tax_agorot: Rational::one(),
            },
            AvgTax {
                store_type: StoreType::SmallGroceries,
                tax_agorot: Rational::from_integer(2),
            },
            AvgTax {
                store_type: StoreType::ConvenienceStores,
                tax_agorot: Rational::from_integer(5),
            },
        ];
        let target = Rational::new(2, 5);
        let extremes = extreme_scenarios(&profiles, &taxes, target).unwrap();
        let values = [30_000.0f64, 40_000.0, 50_000.0];
        let weights = [0.5f64, 0.3, 0.2];
        let mut best_max = f64::MIN;
        let mut best_min = f64::MAX;
        for i in 0..=1000 {
            let s0 = i as f64 / 1000.0;
            for j in 0..=1000 {
                let s1 = j as f64 / 1000.0;
                let s2 = (0.4 - weights[0] * s0 - weights[1] * s1) / weights[2];
                if !(0.0..=1.0).contains(&s2) {
                    continue;
                }
                let total = values[0] * s0 + values[1] * s1 + values[2] * s2;
                best_max = best_max.max(total);
                best_min = best_min.min(total);
            }
        }
        let to_f64 = |v: &BigRational| {
            v.numer().to_string().parse::<f64>().unwrap()
                / v.denom().to_string().parse::<f64>().unwrap()
        };
        // Exact optima: max saturates convenience then 2/3 of small groceries
        // (50000 + 40000 x 2/3 agorot); min fills the budget with
        // supermarkets at share 0.8 (24000 agorot).
        assert_eq!(
            extremes.max.1.grand_total_agorot,
            big(50_000, 1) + big(80_000, 3)
        );
        assert_eq!(extremes.min.1.grand_total_agorot, big(24_000, 1));
        let max_nis = to_f64(&extremes.max.1.grand_total_agorot) / 100.0;
        let min_nis = to_f64(&extremes.min.1.grand_total_agorot) / 100.0;
        assert!((max_nis - best_max / 100.0).abs() <= 1.0, "max {max_nis} grid {best_max}");
        assert!((min_nis - best_min / 100.0).abs() <= 1.0, "min {min_nis} grid {best_min}");
    }

    #[test]
    fn infeasible_target_rejected() {
        let (profiles, taxes) = calibration();
        // Revenue shares sum to 0.999, so a target of 0.9995 is infeasible.
        let err = extreme_scenarios(&profiles, &taxes, Rational::new(9_995, 10_000)).unwrap_err();
        assert!(matches!(err, ScenarioError::InfeasibleTarget { .. }), "{err}");
        let err = extreme_scenarios(&profiles, &taxes, Rational::new(11, 10)).unwrap_err();
        assert!(matches!(err, ScenarioError::TargetOutOfRange { .. }), "{err}");
    }

    #[test]
    fn misaligned_inputs_rejected() {
        let (profiles, _) = calibration();
        let partial = vec![AvgTax {
            store_type: StoreType::SmallGroceries,
            tax_agorot: Rational::one(),
        }];
        let scenario = CashShareScenario::uniform(&profiles, Rational::new(1, 4)).unwrap();
        let err = total_tax(&profiles, &partial, &scenario).unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::MissingStore { store_type: StoreType::SupermarketsAndDrugstores, .. }
        ));
    }

    #[test]
    fn explicit_scenario_validates_aggregate() {
        let (profiles, _) = calibration();
        let shares = vec![
            CashShare {
                store_type: StoreType::SupermarketsAndDrugstores,
                share: Rational::new(1, 4),
            },
            CashShare {
                store_type: StoreType::SmallGroceries,
                share: Rational::new(1, 4),
            },
            CashShare {
                store_type: StoreType::ConvenienceStores,
                share: Rational::new(1, 4),
            },
        ];
        // Correct target: 0.25 x 0.999.
        assert!(CashShareScenario::new(&profiles, &shares, Rational::new(999, 4000)).is_ok());
        let err = CashShareScenario::new(&profiles, &shares, Rational::new(1, 4)).unwrap_err();
        assert!(matches!(err, ScenarioError::AggregateMismatch { .. }));
        let bad = vec![
            CashShare {
                store_type: StoreType::SupermarketsAndDrugstores,
                share: Rational::new(5, 4),
            },
            CashShare {
                store_type: StoreType::SmallGroceries,
                share: Rational::zero(),
            },
            CashShare {
                store_type: StoreType::ConvenienceStores,
                share: Rational::zero(),
            },
        ];
        let err = CashShareScenario::new(&profiles, &bad, Rational::new(1, 4)).unwrap_err();
        assert!(matches!(err, ScenarioError::ShareOutOfRange { .. }));
    }
}
