//! Logistic growth of a single technology and the allometric relation between
//! a killer technology and the victim it displaces.
//!
//! Both technologies follow `level(t) = K / (1 + exp(a - b t))`. Eliminating
//! time between the two curves gives the exact odds identity
//! `V/(K1 - V) = C1 * (Kl/(K2 - Kl))^(1/B)`, which collapses to the power law
//! `Kl = A * V^B` while both levels are small against their capacities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent magnitude past which the logistic is replaced by its asymptote.
const EXP_CLAMP: f64 = 700.0;

/// Parameters `(K, a, b)` of a logistic growth curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLogistic", into = "RawLogistic")]
pub struct LogisticParams {
    capacity: f64,
    location: f64,
    rate: f64,
}

#[derive(Serialize, Deserialize)]
struct RawLogistic {
    #[serde(alias = "K", alias = "k")]
    capacity: f64,
    #[serde(alias = "a")]
    location: f64,
    #[serde(alias = "b")]
    rate: f64,
}

impl TryFrom<RawLogistic> for LogisticParams {
    type Error = Error;

    fn try_from(raw: RawLogistic) -> Result<Self> {
        LogisticParams::new(raw.capacity, raw.location, raw.rate)
    }
}

impl From<LogisticParams> for RawLogistic {
    fn from(p: LogisticParams) -> Self {
        RawLogistic {
            capacity: p.capacity,
            location: p.location,
            rate: p.rate,
        }
    }
}

impl LogisticParams {
    /// Requires a finite positive capacity and a finite non-zero rate.
    pub fn new(capacity: f64, location: f64, rate: f64) -> Result<Self> {
        if !(capacity.is_finite() && capacity > 0.0) {
            return Err(Error::Validation(format!(
                "logistic capacity must be finite and > 0, got {capacity}"
            )));
        }
        if !location.is_finite() {
            return Err(Error::Validation(format!(
                "logistic location must be finite, got {location}"
            )));
        }
        if !(rate.is_finite() && rate != 0.0) {
            return Err(Error::Validation(format!(
                "logistic rate must be finite and non-zero, got {rate}"
            )));
        }
        Ok(LogisticParams {
            capacity,
            location,
            rate,
        })
    }

    /// Carrying capacity `K`.
    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Location constant `a`.
    pub fn location(&self) -> f64 {
        self.location
    }

    /// Growth rate `b`, per year.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Year at which the curve passes through `K/2`, i.e. `a/b`.
    pub fn inflection_time(&self) -> f64 {
        self.location / self.rate
    }
}

/// Level of the logistic curve at time `t`.
pub fn logistic_value(params: &LogisticParams, t: f64) -> f64 {
    let z = params.location - params.rate * t;
    if z > EXP_CLAMP {
        0.0
    } else if z < -EXP_CLAMP {
        params.capacity
    } else {
        params.capacity / (1.0 + z.exp())
    }
}

/// `ln((K - level)/level)`, which equals `a - b t` on the curve.
pub fn logit_transform(params: &LogisticParams, level: f64) -> Result<f64> {
    let k = params.capacity;
    if !(level > 0.0 && level < k) {
        return Err(Error::Domain(format!(
            "logit needs 0 < level < K = {k}, got {level}"
        )));
    }
    Ok(((k - level) / level).ln())
}

/// Constants of `Kl = A * V^B` derived from a victim/killer logistic pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllometricModel {
    /// Scale constant `A`.
    pub scale: f64,
    /// Growth coefficient `B = b_killer / b_victim`.
    pub exponent: f64,
    /// Coupling constant `C1 = exp(b_victim (t_killer - t_victim))`.
    pub coupling: f64,
}

impl AllometricModel {
    /// Victim odds `V/(K1 - V)` implied by the killer odds `Kl/(K2 - Kl)`.
    ///
    /// This is the exact time-eliminated relation, valid at any level.
    pub fn victim_odds(&self, killer_odds: f64) -> f64 {
        self.coupling * killer_odds.powf(1.0 / self.exponent)
    }
}

/// Derives `(A, B, C1)` from the two logistic curves.
///
/// `A = K_killer * C1^(-B) / K_victim^B` is the small-level limit of the odds
/// identity: `Kl/(K2 - Kl) = C1^(-B) (V/(K1 - V))^B` with both denominators
/// replaced by the capacities.
pub fn allometric_constants(
    victim: &LogisticParams,
    killer: &LogisticParams,
) -> Result<AllometricModel> {
    if victim.rate == 0.0 {
        return Err(Error::Domain("victim rate is zero, B undefined".into()));
    }
    let exponent = killer.rate / victim.rate;
    let log_coupling = victim.rate * (killer.inflection_time() - victim.inflection_time());
    let coupling = log_coupling.exp();
    let scale =
        (killer.capacity.ln() - exponent * log_coupling - exponent * victim.capacity.ln()).exp();
    Ok(AllometricModel {
        scale,
        exponent,
        coupling,
    })
}

/// Killer level `A * v^B` predicted from a victim level.
pub fn allometric_predict(model: &AllometricModel, victim_level: f64) -> Result<f64> {
    if !(victim_level > 0.0) {
        return Err(Error::Domain(format!(
            "allometric prediction needs a positive victim level, got {victim_level}"
        )));
    }
    Ok(model.scale * victim_level.powf(model.exponent))
}
