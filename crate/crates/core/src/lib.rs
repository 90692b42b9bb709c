//! Core library for the agora toolkit: exact cash-rounding arithmetic,
//! counter-based random number generation, rounding-tax estimation by
//! simulation and by exact convolution, national aggregation scenarios,
//! left-digit price perception, panel demand estimation with absorbed fixed
//! effects, and price-ending analytics.
//!
//! Money never passes through floating point: amounts are integer agorot,
//! probabilities are exact rationals, and floats appear only in statistical
//! outputs (standard errors, regression estimates) where they are the right
//! tool.

pub mod dist;
pub mod econ;
pub mod fe;
pub mod money;
pub mod numeric;
pub mod penalty;
pub mod perception;
pub mod rng;
pub mod scenario;
pub mod tax;

pub use dist::{
    empirical_ending_distribution, load_observations, load_profiles, sample_basket,
    BasketSizeDistribution, DistError, EndingDistribution, PriceObservation, StoreProfile,
    StoreType, STORE_ORDER,
};
pub use econ::{
    assign_dummies, compute_theta, estimate_demand, filter_durable_prices, find_modal_99_price,
    load_monthly, load_panel, price_change_premium, save_monthly, save_panel, theta_from_parts,
    DemandPanel, DummyAssignment, DummyFlags, EconError, FixedEffect, MonthlyPanel, MonthlyRecord,
    PanelRecord, PremiumFixedEffect, PremiumResult, RegressionResult, Restriction,
    SampleRestrictions,
};
pub use money::{round_bill, rounding_delta, Money, MoneyError, RoundingRegime};
pub use numeric::{parse_decimal, DecimalError, Rational};
pub use penalty::{
    avg_pennies, ending_histogram, inattention_penalty, load_unit_volumes, segment_change,
    EndingHistogram, PenaltyError, PenaltyMode, PenaltyRow, PenaltyTable, PennyReport, PennyStats,
};
pub use perception::{
    generate_panel, perceived_price, BiasParams, CoefficientPlan, PerceivedPrice,
    PerceptionError, SyntheticPanelSpec,
};
pub use rng::Substream;
pub use scenario::{
    extreme_scenarios, load_avg_taxes, total_tax, AvgTax, CashShare, CashShareScenario,
    ExtremeScenarios, ScenarioError, TaxTable, TaxTableRow,
};
pub use tax::{
    exact_rounding_tax, exact_tax, simulate_rounding_tax, simulate_rounding_tax_with_workers,
    SimulationConfig, TaxError, TaxEstimate,
};
