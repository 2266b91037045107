use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ols::{t_critical, RegressionFit};
use crate::error::{Error, Result};

/// Pattern of killer growth relative to the victim, read off `B` against 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `B < 1`: the killer destroys the victim at a lower relative rate.
    UnderDevelopment,
    /// `B = 1`: proportional rates of change.
    ProportionalGrowth,
    /// `B > 1`: the killer destroys the victim at a greater relative rate.
    Development,
}

impl Regime {
    pub fn narrative(&self) -> &'static str {
        match self {
            Regime::UnderDevelopment => {
                "under-development of killer technology: B < 1, the killer destroys the victim at a lower relative rate of change"
            }
            Regime::ProportionalGrowth => {
                "proportional growth of killer technology: B = 1, the killer substitutes the victim at a proportional rate of change"
            }
            Regime::Development => {
                "development of killer technology: B > 1, the killer destroys the victim at a greater relative rate of change"
            }
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::UnderDevelopment => "UnderDevelopment",
            Regime::ProportionalGrowth => "ProportionalGrowth",
            Regime::Development => "Development",
        };
        f.write_str(s)
    }
}

/// How close to 1 the slope must be to count as proportional growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TolerancePolicy {
    /// Two-sided t-test of `B = 1` at the given significance level.
    TTest { level: f64 },
    /// Fixed absolute band `|B - 1| <= tolerance`.
    Absolute { tolerance: f64 },
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy::TTest { level: 0.05 }
    }
}

impl fmt::Display for TolerancePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TolerancePolicy::TTest { level } if *level == 0.05 => f.write_str("ttest"),
            TolerancePolicy::TTest { level } => write!(f, "ttest:{level}"),
            TolerancePolicy::Absolute { tolerance } => write!(f, "abs:{tolerance}"),
        }
    }
}

/// Accepts `ttest`, `ttest:LEVEL`, `abs` (0.05) and `abs:X`.
impl FromStr for TolerancePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let number = |a: &str| {
            a.parse::<f64>()
                .map_err(|_| Error::Validation(format!("invalid tolerance `{a}`")))
        };
        match kind {
            "ttest" => {
                let level = arg.map(number).transpose()?.unwrap_or(0.05);
                if !(level > 0.0 && level < 1.0) {
                    return Err(Error::Validation(format!(
                        "t-test level must be in (0, 1), got {level}"
                    )));
                }
                Ok(TolerancePolicy::TTest { level })
            }
            "abs" => {
                let tolerance = arg.map(number).transpose()?.unwrap_or(0.05);
                if !(tolerance >= 0.0 && tolerance.is_finite()) {
                    return Err(Error::Validation(format!(
                        "absolute tolerance must be >= 0, got {tolerance}"
                    )));
                }
                Ok(TolerancePolicy::Absolute { tolerance })
            }
            _ => Err(Error::Validation(format!(
                "unknown regime tolerance `{s}` (expected ttest or abs:X)"
            ))),
        }
    }
}

impl TolerancePolicy {
    /// Half-width of the proportional band around 1.
    pub fn band(&self, se_beta: f64, n: usize) -> f64 {
        match *self {
            TolerancePolicy::TTest { level } => {
                if n < 3 {
                    return 0.0;
                }
                t_critical(n - 2, level) * se_beta
            }
            TolerancePolicy::Absolute { tolerance } => tolerance,
        }
    }
}

/// Labels a slope estimate given its standard error and sample size.
///
/// The comparison is against +1 literally, so any negative slope lands in
/// [`Regime::UnderDevelopment`].
pub fn classify_slope(beta: f64, se_beta: f64, n: usize, policy: &TolerancePolicy) -> Regime {
    let band = policy.band(se_beta, n);
    let gap = beta - 1.0;
    if gap.abs() <= band {
        Regime::ProportionalGrowth
    } else if gap > 0.0 {
        Regime::Development
    } else {
        Regime::UnderDevelopment
    }
}

pub fn classify_regime(fit: &RegressionFit, policy: &TolerancePolicy) -> Regime {
    classify_slope(fit.beta, fit.se_beta, fit.n, policy)
}
