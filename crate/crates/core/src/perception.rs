//! Left-digit-bias price perception and a synthetic demand-panel
//! generator for validating the estimation pipeline.
//!
//! A buyer with bias `theta` perceives a posted price `p` as
//! `(1 - theta) * p + theta * (delta + floor(p))`: the fractional part is
//! partly replaced by a focal ending `delta`. Perceived prices are
//! computed in exact fixed point at micro-NIS resolution so worked
//! examples reproduce digit for digit.
//!
//! The generator builds weekly demand panels around 99-ending modal
//! prices, cycling 90- and 00-ending variants after a regime-switch year
//! so the ending dummies of the demand regression are identified. It is
//! seed-deterministic: record `i` draws its noise from a dedicated
//! counter-based substream at index `i`.

use thiserror::Error;

use crate::econ::{DemandPanel, EconError, PanelRecord};
use crate::money::Money;
use crate::numeric::{div_round_half_even, format_scaled, Rational};
use crate::rng::{Substream, DOMAIN_PANEL_NOISE};

/// Micro-units per whole (1e-6 resolution).
const MICRO: i128 = 1_000_000;

/// Left-digit bias parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BiasParams {
    theta_micro: u32,
    delta_agorot: u8,
}

impl BiasParams {
    /// Build parameters from a bias weight in micro-units (0 through
    /// 1_000_000) and a focal ending in agorot (0 through 99).
    pub fn new(theta_micro: u32, delta_agorot: u8) -> Result<BiasParams, PerceptionError> {
        if theta_micro > 1_000_000 {
            return Err(PerceptionError::ThetaOutOfRange { theta_micro });
        }
        if delta_agorot > 99 {
            return Err(PerceptionError::DeltaOutOfRange { delta_agorot });
        }
        Ok(BiasParams {
            theta_micro,
            delta_agorot,
        })
    }

    /// Bias weight in micro-units.
    pub fn theta_micro(self) -> u32 {
        self.theta_micro
    }

    /// Focal ending in agorot.
    pub fn delta_agorot(self) -> u8 {
        self.delta_agorot
    }

    /// Bias weight as an exact rational in [0, 1].
    pub fn theta(self) -> Rational {
        Rational::new(i128::from(self.theta_micro), MICRO)
    }
}

/// A perceived price in exact fixed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerceivedPrice {
    /// Perceived value rounded half-even to micro-NIS.
    pub micro_nis: i64,
    /// Perceived value as an exact rational, in NIS.
    pub exact: Rational,
    /// The perceived value is strictly above the posted price, which
    /// happens exactly when the posted ending is below the focal ending.
    pub exceeds_posted: bool,
}

impl PerceivedPrice {
    /// Render the perceived value with the given number of decimal
    /// places (at most 6), rounding half-even.
    pub fn format_nis(&self, decimals: u32) -> String {
        let decimals = decimals.min(6);
        let scale = 10i128.pow(6 - decimals);
        format_scaled(
            div_round_half_even(i128::from(self.micro_nis), scale),
            decimals,
        )
    }
}

/// Errors from perception arithmetic and panel generation.
#[derive(Debug, Error)]
pub enum PerceptionError {
    #[error("theta is {theta_micro} micro-units, above the 1000000 maximum")]
    ThetaOutOfRange { theta_micro: u32 },
    #[error("delta is {delta_agorot} agorot, above the 99 maximum")]
    DeltaOutOfRange { delta_agorot: u8 },
    #[error("price {price} agorot is negative")]
    NegativePrice { price: i64 },
    #[error("perceived price is out of the fixed-point range")]
    Overflow,
    #[error("perceived price of {price} agorot is not positive, so log demand is undefined")]
    NonPositivePerceived { price: i64 },
    #[error("{field} is {value}, below the minimum of {minimum}")]
    CountOutOfRange {
        field: &'static str,
        value: u32,
        minimum: u32,
    },
    #[error("price grid entry {price} agorot is not positive")]
    GridPriceNotPositive { price: i64 },
    #[error("price grid has no 99-ending entry to serve as a modal price")]
    NoModalEnding,
    #[error("elasticity {epsilon} must be strictly negative")]
    ElasticityNotNegative { epsilon: f64 },
    #[error("noise standard deviation {noise_sd} must be finite and nonnegative")]
    NoiseOutOfRange { noise_sd: f64 },
    #[error("coefficient {name} must be finite")]
    NonFiniteCoefficient { name: &'static str },
    #[error("base year {base_year} does not precede post year {post_year}")]
    YearOrder { base_year: i32, post_year: i32 },
    #[error(transparent)]
    Panel(#[from] EconError),
}

/// The perceived value of a posted price under left-digit bias.
///
/// Computes `(1 - theta) * p + theta * (delta + floor(p))` exactly: the
/// result is formed in 1e-8 NIS units from integer inputs, reported both
/// as an exact rational and rounded half-even to micro-NIS. Prices whose
/// ending is below the focal ending perceive as more than they post;
/// the flag records that case.
pub fn perceived_price(
    price: Money,
    params: BiasParams,
) -> Result<PerceivedPrice, PerceptionError> {
    let agorot = price.agorot();
    if agorot < 0 {
        return Err(PerceptionError::NegativePrice { price: agorot });
    }
    let p = i128::from(agorot);
    let theta = i128::from(params.theta_micro);
    let whole = p - p % 100;
    let focal = i128::from(params.delta_agorot) + whole;
    // In 1e-8 NIS: agorot carry 1e-2 NIS and theta carries 1e-6.
    let hundredths_micro = (MICRO - theta) * p + theta * focal;
    let micro_nis = i64::try_from(div_round_half_even(hundredths_micro, 100))
        .map_err(|_| PerceptionError::Overflow)?;
    Ok(PerceivedPrice {
        micro_nis,
        exact: Rational::new(hundredths_micro, 100_000_000),
        exceeds_posted: hundredths_micro > p * MICRO,
    })
}

/// How log demand is generated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoefficientPlan {
    /// Plant the demand-regression coefficients directly:
    /// `ln Q = alpha + beta90 D90 + beta00 D00 + beta99 D99 + epsilon ln P`.
    ReducedForm {
        alpha: f64,
        epsilon: f64,
        beta90: f64,
        beta00: f64,
        beta99: f64,
    },
    /// Run demand off the perceived price:
    /// `ln Q = alpha + epsilon ln p_hat`.
    Structural {
        alpha: f64,
        epsilon: f64,
        bias: BiasParams,
    },
}

/// Blueprint for a synthetic weekly demand panel.
#[derive(Clone, Debug)]
pub struct SyntheticPanelSpec {
    pub n_products: u32,
    pub n_stores: u32,
    /// Total weeks; the first half belongs to `base_year`, the rest to
    /// `post_year`. At least 8, so the base period establishes a strict
    /// modal price and the post period posts both regulated endings.
    pub n_weeks: u32,
    /// Candidate prices; products cycle through the 99-ending entries as
    /// their modal price.
    pub price_grid: Vec<Money>,
    pub plan: CoefficientPlan,
    /// Standard deviation of log-quantity noise.
    pub noise_sd: f64,
    pub seed: u64,
    pub base_year: i32,
    pub post_year: i32,
}

fn require_finite(name: &'static str, value: f64) -> Result<(), PerceptionError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(PerceptionError::NonFiniteCoefficient { name })
    }
}

fn validate(spec: &SyntheticPanelSpec) -> Result<Vec<Money>, PerceptionError> {
    let counts = [
        ("n_products", spec.n_products, 1),
        ("n_stores", spec.n_stores, 1),
        ("n_weeks", spec.n_weeks, 8),
    ];
    for (field, value, minimum) in counts {
        if value < minimum {
            return Err(PerceptionError::CountOutOfRange {
                field,
                value,
                minimum,
            });
        }
    }
    for price in &spec.price_grid {
        if price.agorot() <= 0 {
            return Err(PerceptionError::GridPriceNotPositive {
                price: price.agorot(),
            });
        }
    }
    let modes: Vec<Money> = spec
        .price_grid
        .iter()
        .copied()
        .filter(|p| p.agorot() % 100 == 99)
        .collect();
    if modes.is_empty() {
        return Err(PerceptionError::NoModalEnding);
    }
    let epsilon = match spec.plan {
        CoefficientPlan::ReducedForm {
            alpha,
            epsilon,
            beta90,
            beta00,
            beta99,
        } => {
            require_finite("alpha", alpha)?;
            require_finite("beta90", beta90)?;
            require_finite("beta00", beta00)?;
            require_finite("beta99", beta99)?;
            epsilon
        }
        CoefficientPlan::Structural { alpha, epsilon, .. } => {
            require_finite("alpha", alpha)?;
            epsilon
        }
    };
    if !(epsilon.is_finite() && epsilon < 0.0) {
        return Err(PerceptionError::ElasticityNotNegative { epsilon });
    }
    if !(spec.noise_sd.is_finite() && spec.noise_sd >= 0.0) {
        return Err(PerceptionError::NoiseOutOfRange {
            noise_sd: spec.noise_sd,
        });
    }
    if spec.base_year >= spec.post_year {
        return Err(PerceptionError::YearOrder {
            base_year: spec.base_year,
            post_year: spec.post_year,
        });
    }
    Ok(modes)
}

struct WeekPoint {
    year_is_base: bool,
    price: i64,
    ends_99: bool,
    ends_90: bool,
    ends_00: bool,
}

/// The deterministic week-to-price schedule around one modal price.
///
/// Base half: the mode half the weeks (a strict majority among
/// 99-ending prices) plus flag-free decoys three and five NIS higher.
/// Post half: the two regulated neighbors of the mode on a six-week
/// cycle plus flag-free decoys at the same 90 ending higher up. Each
/// year thus contrasts two prices with identical endings, which pins the
/// price elasticity separately from the ending dummies, both when bias
/// moves perception and under year-absorbing fixed effects.
fn week_point(week: u32, half: u32, mode: i64) -> WeekPoint {
    if week < half {
        let price = match week % 4 {
            0 | 1 => mode,
            2 => mode + 300,
            _ => mode + 500,
        };
        WeekPoint {
            year_is_base: true,
            price,
            ends_99: price == mode,
            ends_90: false,
            ends_00: false,
        }
    } else {
        let (price, ends_90, ends_00) = match week % 6 {
            0 | 3 => (mode - 9, true, false),
            1 | 4 => (mode + 1, false, true),
            2 => (mode + 291, false, false),
            _ => (mode + 491, false, false),
        };
        WeekPoint {
            year_is_base: false,
            price,
            ends_99: false,
            ends_90,
            ends_00,
        }
    }
}

/// Generate a synthetic weekly demand panel.
///
/// Record order is product-major, then store, then week, and record `i`
/// draws its log-quantity noise from substream index `i`, so equal specs
/// produce identical panels.
pub fn generate_panel(spec: &SyntheticPanelSpec) -> Result<DemandPanel, PerceptionError> {
    let modes = validate(spec)?;
    let half = spec.n_weeks / 2;
    let capacity = spec.n_products as usize * spec.n_stores as usize * spec.n_weeks as usize;
    let mut records = Vec::with_capacity(capacity);
    let mut index = 0u64;
    for product in 0..u64::from(spec.n_products) {
        let mode = modes[(product % modes.len() as u64) as usize].agorot();
        for store in 0..u64::from(spec.n_stores) {
            for week in 0..spec.n_weeks {
                let point = week_point(week, half, mode);
                let price = Money::from_agorot(point.price);
                let posted_nis = point.price as f64 / 100.0;
                let mean = match spec.plan {
                    CoefficientPlan::ReducedForm {
                        alpha,
                        epsilon,
                        beta90,
                        beta00,
                        beta99,
                    } => {
                        alpha
                            + beta90 * f64::from(u8::from(point.ends_90))
                            + beta00 * f64::from(u8::from(point.ends_00))
                            + beta99 * f64::from(u8::from(point.ends_99))
                            + epsilon * posted_nis.ln()
                    }
                    CoefficientPlan::Structural {
                        alpha,
                        epsilon,
                        bias,
                    } => {
                        let perceived = perceived_price(price, bias)?;
                        if perceived.exact <= Rational::new(0, 1) {
                            return Err(PerceptionError::NonPositivePerceived {
                                price: point.price,
                            });
                        }
                        let p_hat =
                            *perceived.exact.numer() as f64 / *perceived.exact.denom() as f64;
                        alpha + epsilon * p_hat.ln()
                    }
                };
                let noise = if spec.noise_sd > 0.0 {
                    spec.noise_sd
                        * Substream::new(spec.seed, DOMAIN_PANEL_NOISE, index)
                            .next_standard_normal()
                } else {
                    0.0
                };
                records.push(PanelRecord {
                    product_id: product,
                    store_id: store,
                    chain_id: store % 4,
                    category_id: product % 5,
                    week,
                    year: if point.year_is_base {
                        spec.base_year
                    } else {
                        spec.post_year
                    },
                    month: 1 + ((week % 52) * 12) / 52,
                    price,
                    quantity: (mean + noise).exp(),
                });
                index += 1;
            }
        }
    }
    Ok(DemandPanel::new(records)?)
}
