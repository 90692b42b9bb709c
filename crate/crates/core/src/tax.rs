//! Rounding-tax estimation.
//!
//! Two independent paths compute the expected per-transaction transfer caused
//! by cash rounding: a seeded Monte Carlo simulation over a store profile,
//! and an exact expected value by iterated circular convolution of the ending
//! distribution. The simulation is bit-reproducible for a given seed and
//! configuration regardless of worker count, because each transaction draws
//! from its own counter-addressed substream and the integer accumulators are
//! merged in a fixed order.

use num::{BigInt, BigRational, One, Zero};
use num::integer::Integer;
use thiserror::Error;

use crate::dist::{BasketSizeDistribution, DiscreteSampler, DistError, EndingDistribution, StoreProfile};
use crate::money::{residue_delta, RoundingRegime};
use crate::numeric::{div_round_half_even, Rational};
use crate::rng::{Substream, DOMAIN_TRANSACTIONS};

/// Errors from tax estimation.
#[derive(Debug, Error)]
pub enum TaxError {
    #[error("transaction count must be positive")]
    ZeroTransactions,
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Monte Carlo configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimulationConfig {
    pub n_transactions: u64,
    pub seed: u64,
    pub regime: RoundingRegime,
}

/// Estimated per-transaction rounding transfer, in agorot. Positive means
/// consumers pay more than the posted total.
#[derive(Clone, Debug, PartialEq)]
pub struct TaxEstimate {
    pub regime: RoundingRegime,
    pub n_transactions: u64,
    /// Sample mean at 1e-6 agorot resolution, rounded half to even.
    pub mean_micro_agorot: i64,
    /// Sample mean as an exact rational (agorot).
    pub mean_exact: Rational,
    /// Standard error of the mean (agorot), from the n-1 sample variance.
    pub std_error_agorot: f64,
}

impl TaxEstimate {
    /// Sample mean in agorot as a float, for display and tolerance checks.
    pub fn mean_agorot(&self) -> f64 {
        *self.mean_exact.numer() as f64 / *self.mean_exact.denom() as f64
    }
}

fn delta_table(regime: RoundingRegime) -> ([i64; 10], u64) {
    let g = regime.granularity() as u64;
    let mut table = [0i64; 10];
    for (r, slot) in table.iter_mut().enumerate().take(g as usize) {
        *slot = residue_delta(r as i64, regime);
    }
    (table, g)
}

/// Simulate the rounding tax for one store profile with one worker thread
/// per available CPU. See [`simulate_rounding_tax_with_workers`].
pub fn simulate_rounding_tax(
    profile: &StoreProfile,
    config: &SimulationConfig,
) -> Result<TaxEstimate, TaxError> {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    simulate_rounding_tax_with_workers(profile, config, workers)
}

/// Simulate the rounding tax for one store profile.
///
/// Each transaction `t` draws a basket size, then that many item endings,
/// from the substream addressed by `(seed, t)`; the bill residue is the
/// ending sum modulo the regime granularity, and the transfer is the regime's
/// rounding delta at that residue. The result is identical for every
/// `workers` value because transaction draws never depend on shared RNG
/// state and partial sums are merged in ascending range order.
pub fn simulate_rounding_tax_with_workers(
    profile: &StoreProfile,
    config: &SimulationConfig,
    workers: usize,
) -> Result<TaxEstimate, TaxError> {
    let n = config.n_transactions;
    if n == 0 {
        return Err(TaxError::ZeroTransactions);
    }
    if config.regime == RoundingRegime::None {
        // Bills are unchanged, so every transfer is exactly zero.
        return Ok(TaxEstimate {
            regime: config.regime,
            n_transactions: n,
            mean_micro_agorot: 0,
            mean_exact: Rational::zero(),
            std_error_agorot: 0.0,
        });
    }
    let (delta, granularity) = delta_table(config.regime);
    let endings = profile
        .endings
        .collapse(granularity as u32)?
        .sampler()?;
    let baskets = profile.baskets.sampler()?;

    let workers = workers.max(1) as u64;
    let chunk = n.div_ceil(workers.min(n));
    let mut parts: Vec<(i128, i128)> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        let mut start = 0u64;
        while start < n {
            let stop = (start + chunk).min(n);
            let endings = &endings;
            let baskets = &baskets;
            let seed = config.seed;
            handles.push(scope.spawn(move || {
                simulate_range(seed, start, stop, endings, baskets, &delta, granularity)
            }));
            start = stop;
        }
        for handle in handles {
            parts.push(handle.join().expect("simulation worker panicked"));
        }
    });

    let mut sum = 0i128;
    let mut sum_sq = 0i128;
    for (s, q) in parts {
        sum += s;
        sum_sq += q;
    }
    Ok(estimate_from_sums(config.regime, n, sum, sum_sq))
}

fn simulate_range(
    seed: u64,
    start: u64,
    stop: u64,
    endings: &DiscreteSampler,
    baskets: &DiscreteSampler,
    delta: &[i64; 10],
    granularity: u64,
) -> (i128, i128) {
    let mut sum = 0i128;
    let mut sum_sq = 0i128;
    for t in start..stop {
        let mut rng = Substream::new(seed, DOMAIN_TRANSACTIONS, t);
        let basket_size = baskets.draw(&mut rng) + 1;
        let mut residue_sum = 0u64;
        for _ in 0..basket_size {
            residue_sum += endings.draw(&mut rng) as u64;
        }
        let d = delta[(residue_sum % granularity) as usize];
        sum += d as i128;
        sum_sq += (d * d) as i128;
    }
    (sum, sum_sq)
}

fn estimate_from_sums(regime: RoundingRegime, n: u64, sum: i128, sum_sq: i128) -> TaxEstimate {
    let n_i = n as i128;
    let mean_micro_agorot = div_round_half_even(sum * 1_000_000, n_i);
    let mean_exact = Rational::new(sum, n_i);
    let std_error_agorot = if n > 1 {
        let spread = n_i * sum_sq - sum * sum;
        let n_f = n as f64;
        ((spread as f64) / (n_f * n_f * (n_f - 1.0))).sqrt()
    } else {
        0.0
    };
    TaxEstimate {
        regime,
        n_transactions: n,
        mean_micro_agorot: i64::try_from(mean_micro_agorot)
            .expect("mean transfer exceeds i64 micro-agorot range"),
        mean_exact,
        std_error_agorot,
    }
}

/// Exact expected rounding transfer for one store profile, in agorot.
pub fn exact_rounding_tax(
    profile: &StoreProfile,
    regime: RoundingRegime,
) -> Result<BigRational, TaxError> {
    exact_tax(&profile.endings, &profile.baskets, regime)
}

/// Exact expected rounding transfer for an ending distribution and a basket
/// size distribution, in agorot.
///
/// The residue distribution of a bill with k items is the k-fold circular
/// convolution of the per-item ending distribution modulo the regime
/// granularity. The expectation sums each basket size's delta expectation,
/// weighted by basket mass, entirely in exact integer arithmetic: the k-fold
/// convolution is carried as integer numerators over the common denominator
/// D^k, and the weighted sum is assembled by Horner evaluation in D, so the
/// only rational reduction happens once at the end.
pub fn exact_tax(
    endings: &EndingDistribution,
    baskets: &BasketSizeDistribution,
    regime: RoundingRegime,
) -> Result<BigRational, TaxError> {
    if regime == RoundingRegime::None {
        return Ok(BigRational::zero());
    }
    let granularity = regime.granularity() as u32;
    let collapsed = endings.collapse(granularity)?;
    let g = granularity as usize;
    let delta: Vec<BigInt> = (0..g)
        .map(|r| BigInt::from(residue_delta(r as i64, regime)))
        .collect();

    let mut ending_denom = BigInt::one();
    for mass in collapsed.masses() {
        ending_denom = ending_denom.lcm(&BigInt::from(*mass.denom()));
    }
    let ending_numer: Vec<BigInt> = collapsed
        .masses()
        .iter()
        .map(|m| BigInt::from(*m.numer()) * (&ending_denom / BigInt::from(*m.denom())))
        .collect();

    let k_top = (1..=baskets.k_max())
        .rev()
        .find(|k| !baskets.mass(*k).is_zero())
        .expect("basket distribution is normalized, so some size has mass");
    let mut basket_denom = BigInt::one();
    for k in 1..=k_top {
        let mass = baskets.mass(k);
        if !mass.is_zero() {
            basket_denom = basket_denom.lcm(&BigInt::from(*mass.denom()));
        }
    }

    // conv holds the k-fold convolution numerators over denominator D^k.
    let mut conv = ending_numer.clone();
    let mut acc = BigInt::zero();
    for k in 1..=k_top {
        if k > 1 {
            let mut next = vec![BigInt::zero(); g];
            for (r, left) in conv.iter().enumerate() {
                if left.is_zero() {
                    continue;
                }
                for (s, right) in ending_numer.iter().enumerate() {
                    if right.is_zero() {
                        continue;
                    }
                    next[(r + s) % g] += left * right;
                }
            }
            conv = next;
        }
        acc *= &ending_denom;
        let mass = baskets.mass(k);
        if !mass.is_zero() {
            let delta_sum: BigInt = conv.iter().zip(&delta).map(|(c, d)| c * d).sum();
            let weight =
                BigInt::from(*mass.numer()) * (&basket_denom / BigInt::from(*mass.denom()));
            acc += weight * delta_sum;
        }
    }
    let denominator = basket_denom * num::pow(ending_denom, k_top as usize);
    Ok(BigRational::new(acc, denominator))
}
