//! Exact integer money arithmetic and the two historical cash-rounding
//! regimes.
//!
//! All amounts are whole agorot (1 agora = NIS 0.01) in an `i64`, which covers
//! far more than the +/-10^12 agorot the aggregate tables need. Nothing in any
//! money path touches floating point.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};
use thiserror::Error;

/// An exact amount of money in agorot.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);

    /// Amount from a raw agorot count.
    pub const fn from_agorot(agorot: i64) -> Money {
        Money(agorot)
    }

    /// Amount from whole NIS.
    pub const fn from_nis(nis: i64) -> Money {
        Money(nis * 100)
    }

    pub const fn agorot(self) -> i64 {
        self.0
    }

    /// The agorot part of the price: residue mod 100, always in 0..=99.
    pub const fn ending(self) -> i64 {
        self.0.rem_euclid(100)
    }

    /// Last digit of the agorot amount: residue mod 10.
    pub const fn last_digit(self) -> i64 {
        self.0.rem_euclid(10)
    }

    /// Whole-NIS floor of the amount (9.99 -> 9.00).
    pub const fn floor_to_nis(self) -> Money {
        Money(self.0.div_euclid(100) * 100)
    }
}

impl fmt::Display for Money {
    /// NIS rendering with two decimals: 942 agorot -> "9.42".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let magnitude = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", magnitude / 100, magnitude % 100)
    }
}

impl fmt::Debug for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Money({} agorot)", self.0)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

/// The cash-rounding rule in force when a bill is settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RoundingRegime {
    /// 1991-2008: bills rounded to the nearest 5 agorot.
    Nearest5,
    /// 2008-2014: bills rounded to the nearest 10 agorot, with the asymmetric
    /// rule that endings 1-4 round down and 5-9 round up.
    Nearest10,
    /// Post-2014 and non-cash payments: no rounding.
    None,
}

impl RoundingRegime {
    /// Rounding granularity in agorot (1 means identity).
    pub const fn granularity(self) -> i64 {
        match self {
            RoundingRegime::Nearest5 => 5,
            RoundingRegime::Nearest10 => 10,
            RoundingRegime::None => 1,
        }
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            RoundingRegime::Nearest5 => "nearest5",
            RoundingRegime::Nearest10 => "nearest10",
            RoundingRegime::None => "none",
        }
    }
}

impl std::str::FromStr for RoundingRegime {
    type Err = MoneyError;

    fn from_str(s: &str) -> Result<Self, MoneyError> {
        match s {
            "nearest5" => Ok(RoundingRegime::Nearest5),
            "nearest10" => Ok(RoundingRegime::Nearest10),
            "none" => Ok(RoundingRegime::None),
            other => Err(MoneyError::UnknownRegime {
                name: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for RoundingRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Errors from bill rounding.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoneyError {
    #[error("cannot round a negative bill: {amount} agorot")]
    NegativeBill { amount: i64 },
    #[error("unknown rounding regime {name:?} (expected nearest5, nearest10, or none)")]
    UnknownRegime { name: String },
}

/// Round a cash bill under the given regime.
///
/// Nearest5: endings 1-2 round down, 3-4 round up. Nearest10: endings 1-4
/// round down, 5-9 round up. `None` is the identity. Negative bills are
/// rejected; the rules are defined on nonnegative totals only.
pub fn round_bill(amount: Money, regime: RoundingRegime) -> Result<Money, MoneyError> {
    if amount.agorot() < 0 {
        return Err(MoneyError::NegativeBill {
            amount: amount.agorot(),
        });
    }
    Ok(amount + Money::from_agorot(residue_delta(amount.agorot() % regime.granularity(), regime)))
}

/// The transfer caused by rounding: `round_bill(amount) - amount`, positive
/// when the consumer pays extra.
pub fn rounding_delta(amount: Money, regime: RoundingRegime) -> Result<Money, MoneyError> {
    Ok(round_bill(amount, regime)? - amount)
}

/// Rounding delta as a function of the bill's residue modulo the regime
/// granularity. `residue` must lie in `0..granularity`.
pub(crate) const fn residue_delta(residue: i64, regime: RoundingRegime) -> i64 {
    match regime {
        RoundingRegime::None => 0,
        RoundingRegime::Nearest5 => match residue {
            0 => 0,
            1 | 2 => -residue,
            _ => 5 - residue,
        },
        RoundingRegime::Nearest10 => match residue {
            0 => 0,
            1..=4 => -residue,
            _ => 10 - residue,
        },
    }
}
