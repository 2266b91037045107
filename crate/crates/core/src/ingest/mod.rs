//! Reading annual series from CSV, pairing killer and victim series by year,
//! and resolving dataset manifests.

mod align;
mod manifest;
mod series;

pub use align::{align_pair, AlignedPair, YearRange};
pub use manifest::{DatasetManifest, SeriesRef, SubstitutionPair, TechnologyEntry, WavesManifest};
pub use series::{parse_series, read_series, Observation, TimeSeries};
