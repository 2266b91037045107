use serde::{Deserialize, Serialize};

use super::ols::{ols_fit, RegressionFit};
use crate::error::{Error, Result};
use crate::ingest::TimeSeries;

/// Straight line through `ln(f/(1-f))` against year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherPryFit {
    /// Per-year rate of the logit share line.
    pub slope: f64,
    /// Logit at year 0.
    pub intercept: f64,
    /// Year in which the new technology holds half the market.
    pub t_half: f64,
    pub regression: RegressionFit,
}

impl FisherPryFit {
    /// Fitted share in `year`.
    pub fn share_at(&self, year: f64) -> f64 {
        1.0 / (1.0 + (-(self.intercept + self.slope * year)).exp())
    }
}

/// Fits the Fisher-Pry substitution line to market shares of the new product.
pub fn fisher_pry_fit(shares: &TimeSeries) -> Result<FisherPryFit> {
    if let Some(bad) = shares
        .points()
        .iter()
        .find(|o| !(o.value > 0.0 && o.value < 1.0))
    {
        return Err(Error::Domain(format!(
            "share {} in year {} is outside (0, 1)",
            bad.value, bad.year
        )));
    }
    if shares.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: shares.len(),
        });
    }
    let years: Vec<f64> = shares.years().map(f64::from).collect();
    let logits: Vec<f64> = shares.values().map(|f| (f / (1.0 - f)).ln()).collect();
    let regression = ols_fit(&years, &logits)?;
    if regression.beta == 0.0 || logits.iter().all(|&l| l == logits[0]) {
        return Err(Error::Degenerate(
            "share logit does not change over time; half-substitution year undefined".into(),
        ));
    }
    Ok(FisherPryFit {
        slope: regression.beta,
        intercept: regression.alpha,
        t_half: -regression.alpha / regression.beta,
        regression,
    })
}
