//! Shared fixtures for the engine benchmarks: a representative store
//! profile and a synthetic panel specification, built in code so the
//! benchmarks need no data files.

use agora_core::{
    BasketSizeDistribution, CoefficientPlan, EndingDistribution, Money, Rational, StoreProfile,
    StoreType, SyntheticPanelSpec,
};

/// A supermarket-sized profile: uniform price endings and a basket-size
/// mix spread over one through eight items.
pub fn store_profile() -> StoreProfile {
    let endings = EndingDistribution::new(
        (0..100).map(|_| Rational::new(1, 100)).collect(),
        100,
    )
    .unwrap();
    let baskets = BasketSizeDistribution::new(
        [1, 2, 2, 2, 1, 1, 1]
            .into_iter()
            .map(|tenths| Rational::new(tenths, 10))
            .collect(),
    )
    .unwrap();
    StoreProfile::new(
        StoreType::SupermarketsAndDrugstores,
        endings,
        baskets,
        188_856_000,
        Rational::new(838, 1000),
    )
    .unwrap()
}

/// A mid-sized reduced-form panel: 20 products x 10 stores x 16 weeks.
pub fn panel_spec() -> SyntheticPanelSpec {
    SyntheticPanelSpec {
        n_products: 20,
        n_stores: 10,
        n_weeks: 16,
        price_grid: vec![
            Money::from_agorot(999),
            Money::from_agorot(1299),
            Money::from_agorot(500),
        ],
        plan: CoefficientPlan::ReducedForm {
            alpha: 2.0,
            epsilon: -1.1,
            beta90: 0.05,
            beta00: 0.02,
            beta99: 0.03,
        },
        noise_sd: 0.1,
        seed: 7,
        base_year: 2013,
        post_year: 2014,
    }
}
