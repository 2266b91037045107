//! Generates killer/victim series from two logistic curves, optionally with
//! seeded multiplicative log-normal noise.
//!
//! Parameter file (TOML):
//!
//! ```toml
//! first_year = 0
//! last_year = 30
//! noise_sigma = 0.0
//! seed = 1
//!
//! [victim]
//! K = 100.0
//! a = 5.0
//! b = 0.5
//!
//! [killer]
//! K = 200.0
//! a = 8.0
//! b = 1.0
//! ```

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Observation, TimeSeries};
use crate::substitution::{logistic_value, LogisticParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub victim: LogisticParams,
    pub killer: LogisticParams,
    pub first_year: i32,
    pub last_year: i32,
    /// Standard deviation of the log-scale noise; 0 gives exact curves.
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SimulationSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Manifest(format!("simulation parameters: {e}")))
    }
}

/// Simulated `(killer, victim)` series over the spec's year range.
pub fn simulate_pair(spec: &SimulationSpec) -> Result<(TimeSeries, TimeSeries)> {
    if spec.last_year < spec.first_year {
        return Err(Error::Validation(format!(
            "year range {}:{} produces no rows",
            spec.first_year, spec.last_year
        )));
    }
    if !(spec.noise_sigma >= 0.0 && spec.noise_sigma.is_finite()) {
        return Err(Error::Validation(format!(
            "noise sigma must be finite and >= 0, got {}",
            spec.noise_sigma
        )));
    }
    let noise =
        Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::Validation(format!("noise: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut jitter = |level: f64| {
        if spec.noise_sigma > 0.0 {
            level * noise.sample(&mut rng).exp()
        } else {
            level
        }
    };

    let mut killer = Vec::new();
    let mut victim = Vec::new();
    for year in spec.first_year..=spec.last_year {
        let t = f64::from(year);
        killer.push(Observation {
            year,
            value: jitter(logistic_value(&spec.killer, t)),
        });
        victim.push(Observation {
            year,
            value: jitter(logistic_value(&spec.victim, t)),
        });
    }
    Ok((
        TimeSeries::new("killer", "level", killer)?,
        TimeSeries::new("victim", "level", victim)?,
    ))
}
