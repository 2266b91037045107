//! Structured analysis reports written as JSON with a fixed field order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::estimation::{significance_stars, FisherPryFit, KillerFit, LogisticFit};
use crate::waves::{IntroGapDiagnostic, Takeover, WaveEvents, WaveMetrics, WaveSummary};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub dataset: String,
    pub command: String,
    /// Base of every logarithm in the payload.
    pub log_base: String,
    pub payload: Payload,
    pub narrative: String,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "result", rename_all = "snake_case")]
pub enum Payload {
    KillerFit(KillerFitReport),
    FisherPry(FisherPryReport),
    Waves(WavesReport),
    Logistic(LogisticReport),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Significance {
    pub alpha: String,
    pub beta: String,
    pub f: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillerFitReport {
    pub killer: String,
    pub victim: String,
    /// `A = exp(alpha)`.
    pub scale: f64,
    pub significance: Significance,
    pub fit: KillerFit,
}

impl KillerFitReport {
    pub fn new(killer: &str, victim: &str, fit: KillerFit) -> Self {
        let r = &fit.regression;
        KillerFitReport {
            killer: killer.to_string(),
            victim: victim.to_string(),
            scale: fit.scale(),
            significance: Significance {
                alpha: significance_stars(r.p_value_alpha).into(),
                beta: significance_stars(r.p_value_beta).into(),
                f: significance_stars(r.p_value_f).into(),
            },
            fit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherPryReport {
    pub series: String,
    pub fit: FisherPryFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticReport {
    pub series: String,
    pub inflection_time: f64,
    pub fit: LogisticFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnologyWave {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub events: Option<WaveEvents>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metrics: Option<WaveMetrics>,
    /// `"*"` for a technology still in progress.
    pub marker: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TakeoverRow {
    pub established: String,
    pub killer: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub takeover: Option<Takeover>,
    /// Established revenue as a percentage of the summed revenue of every
    /// manifest series observed in the takeover year.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub established_share_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavesReport {
    pub threshold: f64,
    pub technologies: Vec<TechnologyWave>,
    pub summary: WaveSummary,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub takeovers: Vec<TakeoverRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub intro_gaps: Option<IntroGapDiagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: impl Into<String>, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        let sha256 = digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        InputDigest {
            path: path.into(),
            sha256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<String>,
}

impl Provenance {
    pub fn new(inputs: Vec<InputDigest>, with_timestamp: bool) -> Self {
        Provenance {
            tool: TOOL_NAME.into(),
            tool_version: TOOL_VERSION.into(),
            inputs,
            timestamp: with_timestamp
                .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        }
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Plain-text rendering in the layout of a regression or cycle table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} [{}]", self.dataset, self.command);
        match &self.payload {
            Payload::KillerFit(r) => {
                let g = &r.fit.regression;
                let _ = writeln!(
                    out,
                    "dependent: ln {}   explanatory: ln {}",
                    r.killer, r.victim
                );
                let _ = writeln!(
                    out,
                    "{:>18} {:>18} {:>18} {:>18}",
                    "alpha (se)", "B (se)", "R2 adj (SEE)", "F (sign.)"
                );
                let _ = writeln!(
                    out,
                    "{:>18} {:>18} {:>18} {:>18}",
                    format!("{:.2}{} ({:.2})", g.alpha, r.significance.alpha, g.se_alpha),
                    format!("{:.2}{} ({:.2})", g.beta, r.significance.beta, g.se_beta),
                    format!("{:.2} ({:.2})", g.r2_adj, g.se_estimate),
                    format!("{:.2} ({:.3})", g.f_stat, g.p_value_f),
                );
                let _ = writeln!(
                    out,
                    "n = {}, years {}-{}, regime {} ({})",
                    g.n,
                    r.fit.years_used.first().unwrap_or(&0),
                    r.fit.years_used.last().unwrap_or(&0),
                    r.fit.regime,
                    r.fit.policy
                );
            }
            Payload::FisherPry(r) => {
                let _ = writeln!(
                    out,
                    "ln(f/(1-f)) = {:.6} + {:.6} t   R2 {:.6}   t_half {:.3}",
                    r.fit.intercept, r.fit.slope, r.fit.regression.r2, r.fit.t_half
                );
            }
            Payload::Logistic(r) => {
                let p = &r.fit.params;
                let _ = writeln!(
                    out,
                    "K {:.6}  a {:.6}  b {:.6}  inflection {:.3}  SSE {:.6e}",
                    p.capacity(),
                    p.location(),
                    p.rate(),
                    r.inflection_time,
                    r.fit.sse
                );
            }
            Payload::Waves(w) => write_waves(&mut out, w),
        }
        let _ = writeln!(out, "{}", self.narrative);
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.digits$}"))
}

fn write_waves(out: &mut String, w: &WavesReport) {
    let _ = writeln!(
        out,
        "{:<24} {:>6} {:>6} {:>6} {:>5} {:>5} {:>5} {:>7} {:>7}",
        "technology", "A", "M", "Z", "AM", "MZ", "AZ", "AM/AZ%", "MZ/AZ%"
    );
    for t in &w.technologies {
        let name = format!("{}{}", t.name, t.marker);
        match (&t.events, &t.error) {
            (_, Some(err)) => {
                let _ = writeln!(out, "{name:<24} error: {err}");
            }
            (Some(e), None) => {
                let m = t.metrics.as_ref();
                let _ = writeln!(
                    out,
                    "{:<24} {:>6} {:>6} {:>6} {:>5} {:>5} {:>5} {:>7} {:>7}",
                    name,
                    e.begin_year,
                    e.peak_year,
                    e.end_year.map_or("*".into(), |z| z.to_string()),
                    e.peak_year - e.begin_year,
                    m.map_or("-".into(), |m| m.downwave_years.to_string()),
                    m.map_or("-".into(), |m| m.cycle_years.to_string()),
                    opt(m.and_then(|m| m.upwave_fraction), 2),
                    opt(m.and_then(|m| m.downwave_fraction), 2),
                );
            }
            (None, None) => {}
        }
    }
    let s = &w.summary;
    let _ = writeln!(
        out,
        "mean: AM {} MZ {} AZ {} AM/AZ% {} MZ/AZ% {}",
        opt(s.upwave.mean, 2),
        opt(s.downwave.mean, 2),
        opt(s.cycle.mean, 2),
        opt(s.upwave_fraction.mean, 2),
        opt(s.downwave_fraction.mean, 2)
    );
    let _ = writeln!(
        out,
        "sd:   AM {} MZ {} AZ {}  ({} completed, {} in progress)",
        opt(s.upwave.sd, 2),
        opt(s.downwave.sd, 2),
        opt(s.cycle.sd, 2),
        s.included,
        s.excluded
    );
    for t in &w.takeovers {
        match &t.takeover {
            Some(k) => {
                let _ = writeln!(
                    out,
                    "{} overtakes {} in {} ({} vs {}), established share {}%",
                    t.killer,
                    t.established,
                    k.year,
                    k.new_value,
                    k.old_value,
                    opt(t.established_share_pct, 2)
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "{} has not overtaken {}{}",
                    t.killer,
                    t.established,
                    t.note
                        .as_ref()
                        .map(|n| format!(" ({n})"))
                        .unwrap_or_default()
                );
            }
        }
    }
    if let Some(g) = &w.intro_gaps {
        for r in &g.rows {
            let _ = writeln!(
                out,
                "{} -> {}: introduction gap {} years, disruption period {} years",
                r.established, r.killer, r.gap_years, r.disruption_years
            );
        }
        let _ = writeln!(out, "spearman(gap, disruption) = {}", opt(g.spearman, 3));
    }
}
