use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HEADER: &str = "year,value";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub year: i32,
    pub value: f64,
}

/// An annual series for one technology measure.
///
/// Years are strictly increasing and every value is finite. Gaps between
/// years are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    name: String,
    unit: String,
    points: Vec<Observation>,
}

impl TimeSeries {
    pub fn new(
        name: impl Into<String>,
        unit: impl Into<String>,
        points: Vec<Observation>,
    ) -> Result<Self> {
        for (i, obs) in points.iter().enumerate() {
            if !obs.value.is_finite() {
                return Err(Error::Validation(format!(
                    "non-finite value {} in year {}",
                    obs.value, obs.year
                )));
            }
            if i > 0 && obs.year <= points[i - 1].year {
                return Err(Error::Validation(format!(
                    "year {} does not follow {} (years must be strictly increasing)",
                    obs.year,
                    points[i - 1].year
                )));
            }
        }
        Ok(TimeSeries {
            name: name.into(),
            unit: unit.into(),
            points,
        })
    }

    /// Builds a series from `(year, value)` pairs.
    pub fn from_pairs(
        name: impl Into<String>,
        pairs: impl IntoIterator<Item = (i32, f64)>,
    ) -> Result<Self> {
        let points = pairs
            .into_iter()
            .map(|(year, value)| Observation { year, value })
            .collect();
        TimeSeries::new(name, "", points)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn points(&self) -> &[Observation] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.points.iter().map(|o| o.year)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|o| o.value)
    }

    pub fn value_at(&self, year: i32) -> Option<f64> {
        self.points
            .binary_search_by_key(&year, |o| o.year)
            .ok()
            .map(|i| self.points[i].value)
    }

    /// CSV text that [`parse_series`] reads back to an identical series.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(out, "# name: {}", self.name);
        }
        if !self.unit.is_empty() {
            let _ = writeln!(out, "# unit: {}", self.unit);
        }
        out.push_str(HEADER);
        out.push('\n');
        for obs in &self.points {
            let _ = writeln!(out, "{},{}", obs.year, obs.value);
        }
        out
    }
}

/// Parses the two-column `year,value` CSV format.
///
/// Blank lines and `#` comments are skipped anywhere. The comments
/// `# name: ...` and `# unit: ...` set the series metadata; otherwise the
/// series takes `default_name` and an empty unit.
pub fn parse_series(text: &str, default_name: &str) -> Result<TimeSeries> {
    let mut name = None;
    let mut unit = None;
    let mut seen_header = false;
    let mut points: Vec<Observation> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("name:") {
                name = Some(v.trim().to_string());
            } else if let Some(v) = comment.strip_prefix("unit:") {
                unit = Some(v.trim().to_string());
            }
            continue;
        }
        if !seen_header {
            let header: Vec<&str> = line.split(',').map(str::trim).collect();
            if header != ["year", "value"] {
                return Err(Error::parse(
                    line_no,
                    format!("expected header `{HEADER}`, found `{line}`"),
                ));
            }
            seen_header = true;
            continue;
        }

        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                line_no,
                format!("expected 2 fields, found {}", fields.len()),
            ));
        }
        let year: i32 = fields[0]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid year `{}`", fields[0])))?;
        let value: f64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid value `{}`", fields[1])))?;
        if !value.is_finite() {
            return Err(Error::Validation(format!(
                "line {line_no}: non-finite value `{}`",
                fields[1]
            )));
        }
        if let Some(prev) = points.last() {
            if year == prev.year {
                return Err(Error::Validation(format!(
                    "line {line_no}: duplicate year {year}"
                )));
            }
            if year < prev.year {
                return Err(Error::Validation(format!(
                    "line {line_no}: year {year} precedes {}",
                    prev.year
                )));
            }
        }
        points.push(Observation { year, value });
    }

    if !seen_header {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!("missing header `{HEADER}`"),
        ));
    }
    TimeSeries::new(
        name.unwrap_or_else(|| default_name.to_string()),
        unit.unwrap_or_default(),
        points,
    )
}

/// Reads and parses a series file; the file stem is the default name.
pub fn read_series(path: &Path) -> Result<TimeSeries> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_series(&text, &stem).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        Error::Validation(msg) => Error::Validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_input() {
        let s = parse_series("year,value\n1920,246\n1921,343", "x").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(
            s.points()[0],
            Observation {
                year: 1920,
                value: 246.0
            }
        );
        assert_eq!(s.name(), "x");
    }

    #[test]
    fn duplicate_year_rejected() {
        let err = parse_series("year,value\n1920,246\n1920,300", "x").unwrap_err();
        assert!(
            matches!(err, Error::Validation(ref m) if m.contains("line 3") && m.contains("duplicate"))
        );
    }

    #[test]
    fn decreasing_year_rejected() {
        let err = parse_series("year,value\n1921,246\n1920,300", "x").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn comments_blank_lines_and_gaps() {
        let text = "# name: Tractors on farms\n# unit: thousands\n\nyear,value\n1941,1665\n1942,1905\n# 1943 missing\n\n1944,2354\n";
        let s = parse_series(text, "fallback").unwrap();
        assert_eq!(s.name(), "Tractors on farms");
        assert_eq!(s.unit(), "thousands");
        assert_eq!(s.years().collect::<Vec<_>>(), vec![1941, 1942, 1944]);
    }

    #[test]
    fn malformed_rows_report_line() {
        let err = parse_series("year,value\n1920,abc\n", "x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_series("year,value\n1920,1,000\n", "x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_series("\n# c\nyr,val\n", "x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_series("", "x").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn non_finite_rejected() {
        for bad in ["NaN", "inf", "-inf"] {
            let err = parse_series(&format!("year,value\n1920,{bad}\n"), "x").unwrap_err();
            assert!(matches!(err, Error::Validation(_)), "{bad}");
        }
    }

    #[test]
    fn crlf_tolerated() {
        let s = parse_series("year,value\r\n2000,1.5\r\n", "x").unwrap();
        assert_eq!(s.value_at(2000), Some(1.5));
    }

    fn arb_series() -> impl Strategy<Value = TimeSeries> {
        (
            "[A-Za-z][A-Za-z0-9 ()-]{0,20}",
            "[A-Za-z0-9 $]{0,12}",
            -3000i32..3000,
            prop::collection::vec((1i32..5, -1e12f64..1e12), 0..40),
        )
            .prop_map(|(name, unit, start, steps)| {
                let mut year = start;
                let points = steps
                    .into_iter()
                    .map(|(gap, value)| {
                        year += gap;
                        Observation { year, value }
                    })
                    .collect();
                TimeSeries::new(name.trim(), unit.trim(), points).unwrap()
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip(series in arb_series()) {
            let parsed = parse_series(&series.to_csv(), "").unwrap();
            prop_assert_eq!(parsed, series);
        }
    }
}
