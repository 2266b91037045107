//! TOML manifests describing a killer/victim dataset or a set of technology
//! waves. Relative file paths resolve against the manifest's directory.
//!
//! Pair manifest:
//!
//! ```toml
//! id = "farm-tractor"
//! description = "Tractors vs horses on US farms"
//! adjustment = "none"
//!
//! [killer]
//! file = "tractors.csv"
//! role = "mechanical power"
//!
//! [victim]
//! file = "horses.csv"
//! role = "animal power"
//!
//! [period]
//! first = 1920
//! last = 1960
//! ```
//!
//! Waves manifest: each `[[technology]]` gives either a series `file` or
//! explicit `begin`/`peak`/`end` years; `[[substitution]]` names the
//! established/killer pairs to compare.
//!
//! ```toml
//! id = "recorded-music"
//! threshold = 0.0
//!
//! [[technology]]
//! name = "8-track"
//! file = "eight_track.csv"
//!
//! [[technology]]
//! name = "Cassette"
//! begin = 1964
//! peak = 1990
//! end = 2005
//!
//! [[substitution]]
//! established = "8-track"
//! killer = "Cassette"
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{TimeSeries, YearRange};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRef {
    pub file: PathBuf,
    #[serde(default)]
    pub role: String,
    /// How the series was assembled upstream, e.g. summed sub-modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composition: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub killer: SeriesRef,
    pub victim: SeriesRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<YearRange>,
    /// Provenance only, e.g. "adjusted for inflation, 2018 dollars".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjustment: Option<String>,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    toml::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn year_span(series: &TimeSeries) -> Option<YearRange> {
    let first = series.points().first()?.year;
    let last = series.points().last()?.year;
    Some(YearRange { first, last })
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let mut manifest: DatasetManifest = read_toml(path)?;
        manifest.base_dir = base_dir(path);
        Ok(manifest)
    }

    pub fn from_toml_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut manifest: DatasetManifest =
            toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        manifest.base_dir = base_dir.into();
        Ok(manifest)
    }

    pub fn resolve(&self, series: &SeriesRef) -> PathBuf {
        self.base_dir.join(&series.file)
    }

    /// The period bounds, when present, must overlap both series.
    pub fn check_period(&self, killer: &TimeSeries, victim: &TimeSeries) -> Result<()> {
        let Some(period) = self.period else {
            return Ok(());
        };
        for series in [killer, victim] {
            let overlaps = year_span(series).is_some_and(|span| span.overlaps(&period));
            if !overlaps {
                return Err(Error::Validation(format!(
                    "manifest `{}`: period {period} does not overlap series `{}`",
                    self.id,
                    series.name()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub begin: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstitutionPair {
    pub established: String,
    pub killer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavesManifest {
    pub id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub technology: Vec<TechnologyEntry>,
    #[serde(default)]
    pub substitution: Vec<SubstitutionPair>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl WavesManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let mut manifest: WavesManifest = read_toml(path)?;
        manifest.base_dir = base_dir(path);
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn from_toml_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut manifest: WavesManifest =
            toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        manifest.base_dir = base_dir.into();
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn resolve(&self, file: &Path) -> PathBuf {
        self.base_dir.join(file)
    }

    fn validate(&self) -> Result<()> {
        if self.technology.is_empty() {
            return Err(Error::Manifest(format!(
                "`{}` lists no [[technology]] entries",
                self.id
            )));
        }
        let mut names = HashSet::new();
        for tech in &self.technology {
            if !names.insert(tech.name.as_str()) {
                return Err(Error::Manifest(format!(
                    "technology `{}` listed twice",
                    tech.name
                )));
            }
            let explicit = tech.begin.is_some() || tech.peak.is_some() || tech.end.is_some();
            match (&tech.file, explicit) {
                (Some(_), true) => {
                    return Err(Error::Manifest(format!(
                        "technology `{}` gives both a file and explicit years",
                        tech.name
                    )))
                }
                (None, false) => {
                    return Err(Error::Manifest(format!(
                        "technology `{}` needs a file or begin/peak years",
                        tech.name
                    )))
                }
                (None, true) if tech.begin.is_none() || tech.peak.is_none() => {
                    return Err(Error::Manifest(format!(
                        "technology `{}` needs both begin and peak years",
                        tech.name
                    )))
                }
                _ => {}
            }
        }
        for pair in &self.substitution {
            for name in [&pair.established, &pair.killer] {
                if !names.contains(name.as_str()) {
                    return Err(Error::Manifest(format!(
                        "substitution refers to unknown technology `{name}`"
                    )));
                }
            }
        }
        Ok(())
    }
}
