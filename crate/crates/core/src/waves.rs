//! Technological waves: begin (A), peak (M) and end (Z) of a technology's
//! revenue history, the upwave/downwave/cycle lengths derived from them,
//! and comparisons between an established technology and its successor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::TimeSeries;

/// Begin, peak and end years of one technology's revenue wave.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveEvents {
    pub tech_name: String,
    pub begin_year: i32,
    pub peak_year: i32,
    /// `None` while the technology is still active.
    pub end_year: Option<i32>,
}

impl WaveEvents {
    pub fn new(
        tech_name: impl Into<String>,
        begin_year: i32,
        peak_year: i32,
        end_year: Option<i32>,
    ) -> Result<Self> {
        let tech_name = tech_name.into();
        if begin_year > peak_year {
            return Err(Error::Validation(format!(
                "`{tech_name}`: begin {begin_year} is after peak {peak_year}"
            )));
        }
        if let Some(end) = end_year {
            if peak_year > end {
                return Err(Error::Validation(format!(
                    "`{tech_name}`: peak {peak_year} is after end {end}"
                )));
            }
        }
        Ok(WaveEvents {
            tech_name,
            begin_year,
            peak_year,
            end_year,
        })
    }

    pub fn is_complete(&self) -> bool {
        self.end_year.is_some()
    }
}

/// Reads A, M and Z off a revenue series.
///
/// A and Z are the first and last years above `active_threshold`; M is the
/// year of the maximum, earliest on ties. Z is absent when the final
/// observation is still above the threshold.
pub fn extract_wave_events(series: &TimeSeries, active_threshold: f64) -> Result<WaveEvents> {
    let points = series.points();
    let last = points
        .last()
        .ok_or_else(|| Error::Validation(format!("series `{}` is empty", series.name())))?;
    let active = |v: f64| v > active_threshold;
    let begin = points.iter().find(|o| active(o.value)).ok_or_else(|| {
        Error::Validation(format!(
            "series `{}` never exceeds threshold {active_threshold}",
            series.name()
        ))
    })?;
    let peak = points.iter().fold(
        &points[0],
        |best, o| if o.value > best.value { o } else { best },
    );
    let end = if active(last.value) {
        None
    } else {
        points
            .iter()
            .rev()
            .find(|o| active(o.value))
            .map(|o| o.year)
    };
    WaveEvents::new(series.name(), begin.year, peak.year, end)
}

/// Lengths of one completed wave. Fractions are percentages of the cycle and
/// are absent for a zero-length cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveMetrics {
    /// AM = M - A
    pub upwave_years: i32,
    /// MZ = Z - M, the disruption period.
    pub downwave_years: i32,
    /// AZ = Z - A
    pub cycle_years: i32,
    pub upwave_fraction: Option<f64>,
    pub downwave_fraction: Option<f64>,
}

pub fn wave_metrics(events: &WaveEvents) -> Result<WaveMetrics> {
    let end = events.end_year.ok_or_else(|| {
        Error::Validation(format!(
            "wave of `{}` is still in progress (no end year)",
            events.tech_name
        ))
    })?;
    let upwave_years = events.peak_year - events.begin_year;
    let downwave_years = end - events.peak_year;
    let cycle_years = end - events.begin_year;
    let (upwave_fraction, downwave_fraction) = if cycle_years > 0 {
        let cycle = f64::from(cycle_years);
        (
            Some(100.0 * f64::from(upwave_years) / cycle),
            Some(100.0 * f64::from(downwave_years) / cycle),
        )
    } else {
        (None, None)
    };
    Ok(WaveMetrics {
        upwave_years,
        downwave_years,
        cycle_years,
        upwave_fraction,
        downwave_fraction,
    })
}

/// Arithmetic mean and sample (n - 1) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub count: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

impl MetricSummary {
    pub fn of(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return MetricSummary {
                count,
                mean: None,
                sd: None,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let sd = (count >= 2).then(|| {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count - 1) as f64).sqrt()
        });
        MetricSummary {
            count,
            mean: Some(mean),
            sd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSummary {
    pub upwave: MetricSummary,
    pub downwave: MetricSummary,
    pub cycle: MetricSummary,
    pub upwave_fraction: MetricSummary,
    pub downwave_fraction: MetricSummary,
    pub included: usize,
    /// Waves left out because they have not ended.
    pub excluded: usize,
}

pub fn summarize_waves(metrics: &[WaveMetrics]) -> WaveSummary {
    let years = |f: fn(&WaveMetrics) -> i32| -> Vec<f64> {
        metrics.iter().map(|m| f64::from(f(m))).collect()
    };
    let fractions =
        |f: fn(&WaveMetrics) -> Option<f64>| -> Vec<f64> { metrics.iter().filter_map(f).collect() };
    WaveSummary {
        upwave: MetricSummary::of(&years(|m| m.upwave_years)),
        downwave: MetricSummary::of(&years(|m| m.downwave_years)),
        cycle: MetricSummary::of(&years(|m| m.cycle_years)),
        upwave_fraction: MetricSummary::of(&fractions(|m| m.upwave_fraction)),
        downwave_fraction: MetricSummary::of(&fractions(|m| m.downwave_fraction)),
        included: metrics.len(),
        excluded: 0,
    }
}

/// Summarizes the completed waves among `events`, counting the rest as excluded.
pub fn summarize_events(events: &[WaveEvents]) -> WaveSummary {
    let metrics: Vec<WaveMetrics> = events.iter().filter_map(|e| wave_metrics(e).ok()).collect();
    WaveSummary {
        excluded: events.len() - metrics.len(),
        ..summarize_waves(&metrics)
    }
}

/// First year in which the new technology out-earns the established one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Takeover {
    pub year: i32,
    pub new_value: f64,
    pub old_value: f64,
}

pub fn takeover_year(new_tech: &TimeSeries, established: &TimeSeries) -> Result<Option<Takeover>> {
    let mut any_common = false;
    for obs in new_tech.points() {
        let Some(old_value) = established.value_at(obs.year) else {
            continue;
        };
        any_common = true;
        if obs.value > old_value {
            return Ok(Some(Takeover {
                year: obs.year,
                new_value: obs.value,
                old_value,
            }));
        }
    }
    if !any_common {
        return Err(Error::Validation(format!(
            "`{}` and `{}` share no years",
            new_tech.name(),
            established.name()
        )));
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntroGap {
    pub established: String,
    pub killer: String,
    /// `|killer begin - established begin|`
    pub gap_years: i32,
    /// Downwave (MZ) of the established technology.
    pub disruption_years: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntroGapDiagnostic {
    pub rows: Vec<IntroGap>,
    /// Spearman rank correlation between gap and disruption period.
    pub spearman: Option<f64>,
    /// Pairs whose established technology has not ended yet.
    pub skipped: Vec<String>,
}

/// Pairs introduction gaps with disruption periods.
///
/// Takes `(established, killer)` pairs; pairs whose established wave has not
/// ended carry no disruption period and are listed as skipped.
pub fn intro_gap_diagnostic(pairs: &[(WaveEvents, WaveEvents)]) -> IntroGapDiagnostic {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (established, killer) in pairs {
        match wave_metrics(established) {
            Ok(m) => rows.push(IntroGap {
                established: established.tech_name.clone(),
                killer: killer.tech_name.clone(),
                gap_years: (killer.begin_year - established.begin_year).abs(),
                disruption_years: m.downwave_years,
            }),
            Err(_) => skipped.push(format!("{} -> {}", established.tech_name, killer.tech_name)),
        }
    }
    let gaps: Vec<f64> = rows.iter().map(|r| f64::from(r.gap_years)).collect();
    let dps: Vec<f64> = rows.iter().map(|r| f64::from(r.disruption_years)).collect();
    IntroGapDiagnostic {
        spearman: spearman(&gaps, &dps),
        rows,
        skipped,
    }
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Pearson correlation of the ranks; `None` for fewer than two points or a
/// constant input.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ev(name: &str, a: i32, m: i32, z: Option<i32>) -> WaveEvents {
        WaveEvents::new(name, a, m, z).unwrap()
    }

    fn tent(
        name: &str,
        begin: i32,
        peak: i32,
        end: i32,
        span: std::ops::RangeInclusive<i32>,
    ) -> TimeSeries {
        TimeSeries::from_pairs(
            name,
            span.map(|y| {
                let v = if y < begin || y > end {
                    0.0
                } else if y <= peak {
                    1.0 + f64::from(y - begin)
                } else {
                    f64::from(peak - begin) + 1.0 - 0.5 * f64::from(y - peak)
                };
                (y, v.max(0.0))
            }),
        )
        .unwrap()
    }

    #[test]
    fn eight_track_events() {
        let s = tent("8-track", 1965, 1978, 1982, 1960..=1990);
        assert_eq!(
            extract_wave_events(&s, 0.0).unwrap(),
            ev("8-track", 1965, 1978, Some(1982))
        );
    }

    #[test]
    fn single_year_series_is_in_progress() {
        let s = TimeSeries::from_pairs("x", [(2000, 5.0)]).unwrap();
        assert_eq!(
            extract_wave_events(&s, 0.0).unwrap(),
            ev("x", 2000, 2000, None)
        );
    }

    #[test]
    fn rising_series_has_no_end() {
        let s =
            TimeSeries::from_pairs("x", (2000..2010).map(|y| (y, f64::from(y - 1999)))).unwrap();
        let e = extract_wave_events(&s, 0.0).unwrap();
        assert_eq!(e.end_year, None);
        assert_eq!(e.peak_year, 2009);
    }

    #[test]
    fn peak_ties_take_earliest() {
        let s = TimeSeries::from_pairs("x", [(1, 1.0), (2, 3.0), (3, 3.0), (4, 0.0)]).unwrap();
        assert_eq!(extract_wave_events(&s, 0.0).unwrap().peak_year, 2);
    }

    #[test]
    fn never_active_is_error() {
        let s = TimeSeries::from_pairs("x", [(1, 0.0), (2, 0.0)]).unwrap();
        assert!(extract_wave_events(&s, 0.0).is_err());
        let empty = TimeSeries::from_pairs("x", []).unwrap();
        assert!(extract_wave_events(&empty, 0.0).is_err());
    }

    #[test]
    fn metrics_rows() {
        let m = wave_metrics(&ev("8-track", 1965, 1978, Some(1982))).unwrap();
        assert_eq!(
            (m.upwave_years, m.downwave_years, m.cycle_years),
            (13, 4, 17)
        );
        assert_relative_eq!(m.upwave_fraction.unwrap(), 76.47, epsilon = 0.005);
        assert_relative_eq!(m.downwave_fraction.unwrap(), 23.53, epsilon = 0.005);

        let m = wave_metrics(&ev("CD", 1983, 2001, Some(2018))).unwrap();
        assert_eq!(
            (m.upwave_years, m.downwave_years, m.cycle_years),
            (18, 17, 35)
        );
        assert_relative_eq!(m.upwave_fraction.unwrap(), 51.43, epsilon = 0.005);
        assert_relative_eq!(m.downwave_fraction.unwrap(), 48.57, epsilon = 0.005);

        let m = wave_metrics(&ev("x", 2000, 2000, Some(2000))).unwrap();
        assert_eq!((m.upwave_years, m.downwave_years, m.cycle_years), (0, 0, 0));
        assert_eq!(m.upwave_fraction, None);

        assert!(wave_metrics(&ev("x", 2004, 2012, None)).is_err());
    }

    #[test]
    fn event_order_validated() {
        assert!(WaveEvents::new("x", 2000, 1999, None).is_err());
        assert!(WaveEvents::new("x", 2000, 2005, Some(2004)).is_err());
    }

    #[test]
    fn summaries_use_sample_sd() {
        let dp = MetricSummary::of(&[4.0, 15.0, 17.0]);
        assert_eq!(dp.mean, Some(12.0));
        assert_relative_eq!(dp.sd.unwrap(), 7.0, epsilon = 1e-12);
        let up = MetricSummary::of(&[13.0, 26.0, 18.0]);
        assert_relative_eq!(up.mean.unwrap(), 19.0, epsilon = 1e-12);
        assert_relative_eq!(up.sd.unwrap(), 43f64.sqrt(), epsilon = 1e-12);
        let single = MetricSummary::of(&[10.0]);
        assert_eq!((single.mean, single.sd), (Some(10.0), None));
        assert_eq!(MetricSummary::of(&[]).mean, None);
    }

    #[test]
    fn incomplete_waves_excluded() {
        let s = summarize_events(&[ev("a", 1965, 1978, Some(1982)), ev("b", 2004, 2012, None)]);
        assert_eq!((s.included, s.excluded), (1, 1));
        assert_eq!(s.downwave.sd, None);
    }

    #[test]
    fn takeover_cases() {
        let cd = TimeSeries::from_pairs(
            "cd",
            [
                (1989, 2600.0),
                (1990, 2900.0),
                (1991, 4300.0),
                (1992, 4600.0),
            ],
        )
        .unwrap();
        let cassette = TimeSeries::from_pairs(
            "cassette",
            [
                (1989, 3300.0),
                (1990, 3400.0),
                (1991, 3000.0),
                (1992, 2800.0),
            ],
        )
        .unwrap();
        let t = takeover_year(&cd, &cassette).unwrap().unwrap();
        assert_eq!((t.year, t.new_value, t.old_value), (1991, 4300.0, 3000.0));
        assert_eq!(takeover_year(&cassette, &cassette).unwrap(), None);
        let later = TimeSeries::from_pairs("later", [(2000, 1.0)]).unwrap();
        assert!(takeover_year(&later, &cassette).is_err());
    }

    #[test]
    fn intro_gaps() {
        let eight = ev("8-track", 1965, 1978, Some(1982));
        let cassette = ev("Cassette", 1964, 1990, Some(2005));
        let cd = ev("CD", 1983, 2001, Some(2018));
        let download = ev("Download", 2004, 2012, None);
        let streaming = ev("Streaming", 2005, 2005, None);
        let diag = intro_gap_diagnostic(&[
            (eight.clone(), cassette.clone()),
            (cassette.clone(), cd.clone()),
            (cd.clone(), download.clone()),
            (download, streaming),
            (cd.clone(), cd),
        ]);
        let pairs: Vec<(i32, i32)> = diag
            .rows
            .iter()
            .map(|r| (r.gap_years, r.disruption_years))
            .collect();
        assert_eq!(pairs, vec![(1, 4), (19, 15), (21, 17), (0, 17)]);
        assert_eq!(diag.skipped, vec!["Download -> Streaming".to_string()]);
        assert!(diag.spearman.is_some());
    }

    #[test]
    fn spearman_known_values() {
        assert_relative_eq!(
            spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(),
            1.0
        );
        assert_relative_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 0.0]).unwrap(), -1.0);
        // ranks x = (1, 2.5, 2.5, 4), y = (1, 2, 3, 4)
        assert_relative_eq!(
            spearman(&[1.0, 5.0, 5.0, 9.0], &[1.0, 2.0, 3.0, 4.0]).unwrap(),
            4.5 / (4.5f64 * 5.0).sqrt(),
            epsilon = 1e-12
        );
        assert_eq!(spearman(&[1.0], &[1.0]), None);
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), None);
    }

    fn arb_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..100.0], 1..40)
    }

    proptest! {
        #[test]
        fn metrics_additive(a in 1900i32..2000, up in 0i32..50, down in 0i32..50) {
            let m = wave_metrics(&ev("x", a, a + up, Some(a + up + down))).unwrap();
            prop_assert_eq!(m.upwave_years + m.downwave_years, m.cycle_years);
            if let (Some(u), Some(d)) = (m.upwave_fraction, m.downwave_fraction) {
                prop_assert!((u + d - 100.0).abs() < 1e-9);
            }
        }

        #[test]
        fn raising_threshold_never_widens(values in arb_values(), t1 in 0.0f64..50.0, dt in 0.0f64..50.0) {
            let s = TimeSeries::from_pairs("x", values.iter().enumerate().map(|(i, &v)| (i as i32, v))).unwrap();
            let last = values.len() as i32 - 1;
            if let (Ok(lo), Ok(hi)) = (extract_wave_events(&s, t1), extract_wave_events(&s, t1 + dt)) {
                prop_assert!(hi.begin_year >= lo.begin_year);
                prop_assert!(hi.end_year.unwrap_or(last) <= lo.end_year.unwrap_or(last));
                prop_assert_eq!(extract_wave_events(&s, t1).unwrap(), lo);
            }
        }

        #[test]
        fn takeover_is_first_crossing(
            pairs in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..30),
        ) {
            let new = TimeSeries::from_pairs("n", pairs.iter().enumerate().map(|(i, p)| (i as i32, p.0))).unwrap();
            let old = TimeSeries::from_pairs("o", pairs.iter().enumerate().map(|(i, p)| (i as i32, p.1))).unwrap();
            match takeover_year(&new, &old).unwrap() {
                Some(t) => {
                    prop_assert!(t.new_value > t.old_value);
                    for (i, p) in pairs.iter().enumerate().take(t.year as usize) {
                        prop_assert!(p.0 <= p.1, "earlier crossing at {}", i);
                    }
                }
                None => prop_assert!(pairs.iter().all(|p| p.0 <= p.1)),
            }
        }
    }
}
