use serde::{Deserialize, Serialize};

use super::ols::{ols_fit, RegressionFit};
use super::regime::{classify_regime, Regime, TolerancePolicy};
use crate::error::{Error, Result};
use crate::ingest::{align_pair, AlignedPair, TimeSeries, YearRange};

/// Direction in which the two series move together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoMovement {
    /// `B > 0`: killer and victim rise and fall together.
    Same,
    /// `B < 0`: the killer grows while the victim shrinks.
    Opposite,
    /// `B = 0`.
    Independent,
}

impl CoMovement {
    pub fn of_slope(beta: f64) -> Self {
        if beta > 0.0 {
            CoMovement::Same
        } else if beta < 0.0 {
            CoMovement::Opposite
        } else {
            CoMovement::Independent
        }
    }
}

/// One aligned year in natural-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPoint {
    pub year: i32,
    pub log_victim: f64,
    pub log_killer: f64,
}

#[derive(Debug, Clone, Default)]
pub struct KillerFitOptions {
    pub bounds: Option<YearRange>,
    pub policy: TolerancePolicy,
}

/// Estimate of `ln Kl = ln A + B ln V + u` for one killer/victim pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillerFit {
    /// `alpha = ln A`, `beta = B`.
    pub regression: RegressionFit,
    pub regime: Regime,
    pub co_movement: CoMovement,
    pub policy: TolerancePolicy,
    pub years_used: Vec<i32>,
    /// Aligned years dropped because either value was not positive.
    pub n_dropped: usize,
    /// Years present in only one of the two series (or outside the bounds).
    pub unmatched_killer: usize,
    pub unmatched_victim: usize,
    #[serde(skip)]
    pub points: Vec<LogPoint>,
}

impl KillerFit {
    /// Scale constant `A = exp(alpha)`.
    pub fn scale(&self) -> f64 {
        self.regression.alpha.exp()
    }
}

/// Aligns the two series by year and regresses log killer on log victim.
pub fn killer_fit(
    killer: &TimeSeries,
    victim: &TimeSeries,
    options: &KillerFitOptions,
) -> Result<KillerFit> {
    let pair = align_pair(killer, victim, options.bounds)?;
    killer_fit_aligned(&pair, &options.policy)
}

pub fn killer_fit_aligned(pair: &AlignedPair, policy: &TolerancePolicy) -> Result<KillerFit> {
    let points: Vec<LogPoint> = pair
        .years
        .iter()
        .zip(pair.killer.iter().zip(&pair.victim))
        .filter(|(_, (&k, &v))| k > 0.0 && v > 0.0)
        .map(|(&year, (&k, &v))| LogPoint {
            year,
            log_victim: v.ln(),
            log_killer: k.ln(),
        })
        .collect();
    let n_dropped = pair.len() - points.len();
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }

    let xs: Vec<f64> = points.iter().map(|p| p.log_victim).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.log_killer).collect();
    let regression = ols_fit(&xs, &ys)?;
    Ok(KillerFit {
        regime: classify_regime(&regression, policy),
        co_movement: CoMovement::of_slope(regression.beta),
        policy: *policy,
        years_used: points.iter().map(|p| p.year).collect(),
        n_dropped,
        unmatched_killer: pair.dropped_killer,
        unmatched_victim: pair.dropped_victim,
        points,
        regression,
    })
}
