//! Exact decimal parsing and the rounding conventions used across the crate.
//!
//! Probabilities, revenue shares, and tax rates arrive as decimal text and are
//! held as exact rationals so that validation (masses summing to 1) and
//! aggregation never accumulate binary floating-point error. Two integer
//! rounding modes are provided: half-to-even for statistics (penny means,
//! micro-NIS perceived prices) and half-away-from-zero for whole-NIS
//! presentation totals.

use num::rational::Ratio;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use thiserror::Error;

/// Exact rational with machine-word precision, used for all probability and
/// share arithmetic. Heavy convolution work upgrades to [`BigRational`].
pub type Rational = Ratio<i128>;

/// Errors from exact decimal parsing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecimalError {
    #[error("empty decimal literal")]
    Empty,
    #[error("invalid decimal literal {literal:?}")]
    Invalid { literal: String },
    #[error("decimal literal {literal:?} has more than {max} fractional digits")]
    TooPrecise { literal: String, max: usize },
}

const MAX_FRACTION_DIGITS: usize = 18;

/// Parse a plain decimal literal (`"0.0075"`, `"-3.1"`, `"42"`) into an exact
/// rational. At most 18 fractional digits are accepted.
pub fn parse_decimal(text: &str) -> Result<Rational, DecimalError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(DecimalError::Empty);
    }
    let invalid = || DecimalError::Invalid {
        literal: trimmed.to_string(),
    };
    let (negative, digits) = match trimmed.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, trimmed.strip_prefix('+').unwrap_or(trimmed)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(invalid());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid());
    }
    if frac_part.len() > MAX_FRACTION_DIGITS {
        return Err(DecimalError::TooPrecise {
            literal: trimmed.to_string(),
            max: MAX_FRACTION_DIGITS,
        });
    }
    let mut numerator: i128 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        numerator = numerator
            .checked_mul(10)
            .and_then(|n| n.checked_add((b - b'0') as i128))
            .ok_or_else(invalid)?;
    }
    if negative {
        numerator = -numerator;
    }
    let denominator = 10_i128.pow(frac_part.len() as u32);
    Ok(Rational::new(numerator, denominator))
}

/// Divide `numerator / denominator` rounding halves to the nearest even
/// quotient. `denominator` must be positive.
pub fn div_round_half_even(numerator: i128, denominator: i128) -> i128 {
    assert!(denominator > 0, "denominator must be positive");
    let quotient = numerator.div_euclid(denominator);
    let remainder = numerator.rem_euclid(denominator);
    match (2 * remainder).cmp(&denominator) {
        std::cmp::Ordering::Less => quotient,
        std::cmp::Ordering::Greater => quotient + 1,
        std::cmp::Ordering::Equal => quotient + (quotient & 1),
    }
}

/// Divide `numerator / denominator` rounding halves away from zero.
/// `denominator` must be positive.
pub fn div_round_half_away(numerator: i128, denominator: i128) -> i128 {
    assert!(denominator > 0, "denominator must be positive");
    if numerator >= 0 {
        (numerator + denominator / 2) / denominator
    } else {
        -((-numerator + denominator / 2) / denominator)
    }
}

/// Round an exact rational to the nearest integer, halves to even.
pub fn ratio_round_half_even(value: &Rational) -> i128 {
    div_round_half_even(*value.numer(), *value.denom())
}

/// Round an exact big rational to the nearest integer, halves away from zero.
/// This is the whole-NIS presentation rounding for report totals.
pub fn big_ratio_round_half_away(value: &BigRational) -> BigInt {
    let numer = value.numer();
    let denom = value.denom();
    debug_assert!(denom.is_positive());
    let twice = BigInt::from(2) * numer.abs() + denom;
    let magnitude = twice / (BigInt::from(2) * denom);
    if numer.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// Render an exact rational as a fixed-point decimal string with `digits`
/// fractional digits, rounding halves to even. Reports use this so repeated
/// runs emit byte-identical bodies.
pub fn format_ratio_fixed(value: &Rational, digits: u32) -> String {
    let scale = 10_i128.pow(digits);
    let scaled = div_round_half_even(value.numer() * scale, *value.denom());
    format_scaled(scaled, digits)
}

/// Render `scaled / 10^digits` as a fixed-point decimal string.
pub fn format_scaled(scaled: i128, digits: u32) -> String {
    let scale = 10_i128.pow(digits);
    let sign = if scaled < 0 { "-" } else { "" };
    let magnitude = scaled.unsigned_abs();
    let whole = magnitude / scale as u128;
    if digits == 0 {
        return format!("{sign}{whole}");
    }
    let frac = magnitude % scale as u128;
    format!("{sign}{whole}.{frac:0width$}", width = digits as usize)
}

/// Round an exact big rational to the nearest integer, halves to even.
pub fn big_ratio_round_half_even(value: &BigRational) -> BigInt {
    let (quotient, remainder) = value.numer().div_mod_floor(value.denom());
    let twice = BigInt::from(2) * remainder;
    match twice.cmp(value.denom()) {
        std::cmp::Ordering::Less => quotient,
        std::cmp::Ordering::Greater => quotient + 1,
        std::cmp::Ordering::Equal => {
            if quotient.is_odd() {
                quotient + 1
            } else {
                quotient
            }
        }
    }
}

/// Render an exact big rational as a fixed-point decimal string with
/// `digits` fractional digits, rounding halves to even.
pub fn format_big_ratio_fixed(value: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10).pow(digits);
    let scaled = big_ratio_round_half_even(&(value * BigRational::from_integer(scale.clone())));
    let sign = if scaled.is_negative() { "-" } else { "" };
    let magnitude = scaled.abs();
    let (whole, frac) = magnitude.div_rem(&scale);
    if digits == 0 {
        return format!("{sign}{whole}");
    }
    format!(
        "{sign}{whole}.{:0>width$}",
        frac.to_string(),
        width = digits as usize
    )
}

/// Convert a machine rational to the arbitrary-precision form.
pub fn to_big(value: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*value.numer()), BigInt::from(*value.denom()))
}

/// Sum of rationals, checking that it equals 1 within `tolerance`.
pub fn sums_to_one(masses: impl Iterator<Item = Rational>, tolerance: Rational) -> bool {
    let mut sum = Rational::zero();
    for m in masses {
        sum += m;
    }
    (sum - Rational::one()).abs() <= tolerance
}
