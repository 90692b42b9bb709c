//! Shared flag enums. Each one parses from the same token on the command
//! line (via clap) and in config files (via `FromStr`), and displays as that
//! token so manifests echo exactly what a rerun would accept.

use std::fmt;
use std::str::FromStr;

use agora_core::{FixedEffect, PenaltyMode, PremiumFixedEffect, Restriction, RoundingRegime};
use clap::ValueEnum;

macro_rules! token_enum {
    ($name:ident { $($variant:ident => $token:literal),+ $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
        pub enum $name {
            $(#[value(name = $token)] $variant),+
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self {
                    $(Self::$variant => f.write_str($token)),+
                }
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($token => Ok(Self::$variant),)+
                    other => Err(format!(
                        "unknown value {other:?}, expected one of: {}",
                        [$($token),+].join(", ")
                    )),
                }
            }
        }
    };
}

token_enum!(RegimeArg {
    Nearest5 => "nearest5",
    Nearest10 => "nearest10",
    None => "none",
});

token_enum!(RestrictionArg {
    BothEndings => "both-endings",
    EitherEnding => "either-ending",
});

token_enum!(FeArg {
    ProductStore => "product_store",
    CatYear => "cat_year",
    CatMonth => "cat_month",
    Chain => "chain",
});

token_enum!(PremiumFeArg {
    Year => "year",
    Month => "month",
    Product => "product",
    Store => "store",
});

token_enum!(ModeArg {
    OneDecimal => "one-decimal",
    Exact => "exact",
});

token_enum!(PlanArg {
    Reduced => "reduced",
    Structural => "structural",
});

impl From<RegimeArg> for RoundingRegime {
    fn from(arg: RegimeArg) -> RoundingRegime {
        match arg {
            RegimeArg::Nearest5 => RoundingRegime::Nearest5,
            RegimeArg::Nearest10 => RoundingRegime::Nearest10,
            RegimeArg::None => RoundingRegime::None,
        }
    }
}

impl From<RestrictionArg> for Restriction {
    fn from(arg: RestrictionArg) -> Restriction {
        match arg {
            RestrictionArg::BothEndings => Restriction::BothEndings,
            RestrictionArg::EitherEnding => Restriction::EitherEnding,
        }
    }
}

impl From<FeArg> for FixedEffect {
    fn from(arg: FeArg) -> FixedEffect {
        match arg {
            FeArg::ProductStore => FixedEffect::ProductStore,
            FeArg::CatYear => FixedEffect::CategoryYear,
            FeArg::CatMonth => FixedEffect::CategoryMonth,
            FeArg::Chain => FixedEffect::Chain,
        }
    }
}

impl From<PremiumFeArg> for PremiumFixedEffect {
    fn from(arg: PremiumFeArg) -> PremiumFixedEffect {
        match arg {
            PremiumFeArg::Year => PremiumFixedEffect::Year,
            PremiumFeArg::Month => PremiumFixedEffect::Month,
            PremiumFeArg::Product => PremiumFixedEffect::Product,
            PremiumFeArg::Store => PremiumFixedEffect::Store,
        }
    }
}

impl From<ModeArg> for PenaltyMode {
    fn from(arg: ModeArg) -> PenaltyMode {
        match arg {
            ModeArg::OneDecimal => PenaltyMode::OneDecimal,
            ModeArg::Exact => PenaltyMode::Exact,
        }
    }
}
