//! Command-line front end. [`run`] executes a parsed command and returns the
//! text destined for stdout; the binary maps errors to exit codes.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimation::{
    fisher_pry_fit, killer_fit_aligned, logistic_fit, CoMovement, TolerancePolicy,
};
use crate::ingest::{
    align_pair, parse_series, DatasetManifest, TimeSeries, WavesManifest, YearRange,
};
use crate::plot::{render_svg, ScatterPlot};
use crate::report::{
    AnalysisReport, FisherPryReport, InputDigest, KillerFitReport, LogisticReport, Payload,
    Provenance, TakeoverRow, TechnologyWave, WavesReport,
};
use crate::simulate::{simulate_pair, SimulationSpec};
use crate::waves::{
    extract_wave_events, intro_gap_diagnostic, summarize_events, takeover_year, wave_metrics,
    WaveEvents,
};

#[derive(Debug, Parser)]
#[command(
    name = "techsub",
    version,
    about = "Killer/victim technology substitution analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regress ln(killer) on ln(victim) and classify the growth coefficient B.
    FitKiller(FitKillerArgs),
    /// Fit the Fisher-Pry logit line to market shares of the new technology.
    FisherPry(FisherPryArgs),
    /// Technological waves, disruption periods and takeovers from a manifest.
    Waves(WavesArgs),
    /// Write exact (or noisy) killer/victim logistic series as CSV.
    Simulate(SimulateArgs),
    /// Fit a logistic growth curve to one series.
    FitLogistic(FitLogisticArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Omit the timestamp so identical inputs give byte-identical reports.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct FitKillerArgs {
    /// Killer series CSV (`year,value`).
    #[arg(required_unless_present = "manifest")]
    pub killer: Option<PathBuf>,
    /// Victim series CSV (`year,value`).
    #[arg(required_unless_present = "manifest")]
    pub victim: Option<PathBuf>,
    /// Dataset manifest naming both series and the period.
    #[arg(long, conflicts_with_all = ["killer", "victim"])]
    pub manifest: Option<PathBuf>,
    /// Restrict to FIRST:LAST (overrides the manifest period).
    #[arg(long, value_parser = parse_range)]
    pub period: Option<YearRange>,
    /// Write a log-log SVG scatter with the fitted line.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// `ttest`, `ttest:LEVEL` or `abs:X`.
    #[arg(long, default_value = "ttest", value_parser = parse_policy)]
    pub regime_tolerance: TolerancePolicy,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Args)]
pub struct FisherPryArgs {
    /// Market share CSV, values in (0, 1).
    pub shares: PathBuf,
    #[arg(long, value_parser = parse_range)]
    pub period: Option<YearRange>,
    /// Write a semilog SVG of f/(1-f) against year.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Args)]
pub struct WavesArgs {
    /// Waves manifest (TOML).
    pub manifest: PathBuf,
    /// A year counts as active when its value exceeds this (default 0).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulation parameters (TOML).
    pub params: PathBuf,
    /// Directory receiving killer.csv and victim.csv.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Override the year range, FIRST:LAST.
    #[arg(long, value_parser = parse_range)]
    pub years: Option<YearRange>,
    /// Override the log-scale noise standard deviation.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FitLogisticArgs {
    pub series: PathBuf,
    #[arg(long, value_parser = parse_range)]
    pub period: Option<YearRange>,
    #[command(flatten)]
    pub report: ReportArgs,
}

fn parse_range(s: &str) -> std::result::Result<YearRange, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_policy(s: &str) -> std::result::Result<TolerancePolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A series file with the digest of its bytes.
struct Loaded {
    series: TimeSeries,
    digest: InputDigest,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn load_series(path: &Path) -> Result<Loaded> {
    let bytes = read_bytes(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::parse(0, format!("{}: not valid UTF-8", path.display())))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let series = parse_series(&text, &stem).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok(Loaded {
        series,
        digest: InputDigest::of(path.display().to_string(), &bytes),
    })
}

fn restrict(series: &TimeSeries, period: Option<YearRange>) -> Result<TimeSeries> {
    match period {
        None => Ok(series.clone()),
        Some(p) => TimeSeries::new(
            series.name(),
            series.unit(),
            series
                .points()
                .iter()
                .copied()
                .filter(|o| p.contains(o.year))
                .collect(),
        ),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path.display().to_string(), e))
}

fn emit(report: &AnalysisReport, args: &ReportArgs) -> Result<String> {
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &args.output {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::FitKiller(args) => {
            let (report, _) = cmd_fit_killer(&args)?;
            emit(&report, &args.report)
        }
        Command::FisherPry(args) => emit(&cmd_fisher_pry(&args)?, &args.report),
        Command::Waves(args) => emit(&cmd_waves(&args)?, &args.report),
        Command::Simulate(args) => {
            let written = cmd_simulate(&args)?;
            Ok(written
                .iter()
                .map(|p| format!("wrote {}\n", p.display()))
                .collect())
        }
        Command::FitLogistic(args) => emit(&cmd_fit_logistic(&args)?, &args.report),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Runs the killer fit; also returns the SVG text when a plot was requested.
pub fn cmd_fit_killer(args: &FitKillerArgs) -> Result<(AnalysisReport, Option<String>)> {
    let mut digests = Vec::new();
    let (dataset, killer_path, victim_path, manifest_period, mut notes) = match &args.manifest {
        Some(path) => {
            let manifest = DatasetManifest::load(path)?;
            digests.push(InputDigest::of(
                path.display().to_string(),
                &read_bytes(path)?,
            ));
            let mut notes = Vec::new();
            if let Some(adj) = &manifest.adjustment {
                notes.push(format!("values {adj}"));
            }
            for (label, r) in [("killer", &manifest.killer), ("victim", &manifest.victim)] {
                if let Some(c) = &r.composition {
                    notes.push(format!("{label} series composition: {c}"));
                }
            }
            (
                manifest.id.clone(),
                manifest.resolve(&manifest.killer),
                manifest.resolve(&manifest.victim),
                Some((manifest.clone(), manifest.period)),
                notes,
            )
        }
        None => {
            let (k, v) = (
                args.killer.clone().expect("clap enforces killer"),
                args.victim.clone().expect("clap enforces victim"),
            );
            (
                format!("{}-vs-{}", stem(&k), stem(&v)),
                k,
                v,
                None,
                Vec::new(),
            )
        }
    };

    let killer = load_series(&killer_path)?;
    let victim = load_series(&victim_path)?;
    digests.push(killer.digest);
    digests.push(victim.digest);

    let bounds = match &manifest_period {
        Some((manifest, period)) => {
            manifest.check_period(&killer.series, &victim.series)?;
            args.period.or(*period)
        }
        None => args.period,
    };
    let pair = align_pair(&killer.series, &victim.series, bounds)?;
    let fit = killer_fit_aligned(&pair, &args.regime_tolerance)?;

    let mut warnings = Vec::new();
    if fit.n_dropped > 0 {
        warnings.push(format!(
            "n_dropped={}: aligned year(s) with non-positive values excluded from the log-log fit",
            fit.n_dropped
        ));
    }
    if fit.unmatched_killer > 0 || fit.unmatched_victim > 0 {
        warnings.push(format!(
            "{} killer and {} victim year(s) had no counterpart{}",
            fit.unmatched_killer,
            fit.unmatched_victim,
            bounds.map(|b| format!(" within {b}")).unwrap_or_default()
        ));
    }
    warnings.append(&mut notes);

    let r = &fit.regression;
    let direction = match fit.co_movement {
        CoMovement::Same => "killer and victim move in the same direction",
        CoMovement::Opposite => "negative B: the killer grows while the victim shrinks",
        CoMovement::Independent => "B = 0: no co-movement",
    };
    let narrative = format!(
        "B = {:.4} (se {:.4}, n = {}); {}; {} [tolerance {}]; natural logarithms",
        r.beta,
        r.se_beta,
        r.n,
        fit.regime.narrative(),
        direction,
        fit.policy
    );

    let svg = args.plot.as_ref().map(|path| {
        let plot = ScatterPlot {
            title: format!("{} on {}", killer.series.name(), victim.series.name()),
            x_label: axis_label("ln", victim.series.name(), victim.series.unit()),
            y_label: axis_label("ln", killer.series.name(), killer.series.unit()),
            points: fit
                .points
                .iter()
                .map(|p| (p.log_victim, p.log_killer))
                .collect(),
            line: Some((r.alpha, r.beta)),
            annotation: Some(format!(
                "B = {:.3}  ln A = {:.3}  R2 adj = {:.3}  ({})",
                r.beta, r.alpha, r.r2_adj, fit.regime
            )),
            vertical_marker: None,
        };
        (path, render_svg(&plot))
    });
    if let Some((path, text)) = &svg {
        write_file(path, text)?;
    }

    let report = AnalysisReport {
        dataset,
        command: "fit-killer".into(),
        log_base: "e".into(),
        payload: Payload::KillerFit(KillerFitReport::new(
            killer.series.name(),
            victim.series.name(),
            fit,
        )),
        narrative,
        provenance: Provenance::new(digests, !args.report.no_timestamp),
        warnings,
    };
    Ok((report, svg.map(|(_, s)| s)))
}

fn axis_label(prefix: &str, name: &str, unit: &str) -> String {
    if unit.is_empty() {
        format!("{prefix} {name}")
    } else {
        format!("{prefix} {name} ({unit})")
    }
}

pub fn cmd_fisher_pry(args: &FisherPryArgs) -> Result<AnalysisReport> {
    let loaded = load_series(&args.shares)?;
    let shares = restrict(&loaded.series, args.period)?;
    let fit = fisher_pry_fit(&shares)?;

    if let Some(path) = &args.plot {
        let plot = ScatterPlot {
            title: format!("Fisher-Pry substitution: {}", shares.name()),
            x_label: "year".into(),
            y_label: "ln(f/(1-f))".into(),
            points: shares
                .points()
                .iter()
                .map(|o| (f64::from(o.year), (o.value / (1.0 - o.value)).ln()))
                .collect(),
            line: Some((fit.intercept, fit.slope)),
            annotation: Some(format!(
                "slope = {:.4}/yr  R2 = {:.4}",
                fit.slope, fit.regression.r2
            )),
            vertical_marker: Some((fit.t_half, format!("t_half = {:.2}", fit.t_half))),
        };
        write_file(path, &render_svg(&plot))?;
    }

    let narrative = format!(
        "share logit rises {:.4} per year; the new technology reaches half the market in {:.2}; natural logarithms",
        fit.slope, fit.t_half
    );
    Ok(AnalysisReport {
        dataset: stem(&args.shares),
        command: "fisher-pry".into(),
        log_base: "e".into(),
        payload: Payload::FisherPry(FisherPryReport {
            series: shares.name().to_string(),
            fit,
        }),
        narrative,
        provenance: Provenance::new(vec![loaded.digest], !args.report.no_timestamp),
        warnings: Vec::new(),
    })
}

pub fn cmd_fit_logistic(args: &FitLogisticArgs) -> Result<AnalysisReport> {
    let loaded = load_series(&args.series)?;
    let series = restrict(&loaded.series, args.period)?;
    let fit = logistic_fit(&series)?;
    let narrative = format!(
        "capacity {:.4}, growth rate {:.4}/yr, inflection at {:.2}",
        fit.params.capacity(),
        fit.params.rate(),
        fit.params.inflection_time()
    );
    Ok(AnalysisReport {
        dataset: stem(&args.series),
        command: "fit-logistic".into(),
        log_base: "e".into(),
        payload: Payload::Logistic(LogisticReport {
            series: series.name().to_string(),
            inflection_time: fit.params.inflection_time(),
            fit,
        }),
        narrative,
        provenance: Provenance::new(vec![loaded.digest], !args.report.no_timestamp),
        warnings: Vec::new(),
    })
}

enum Source {
    Series(TimeSeries),
    Explicit,
}

pub fn cmd_waves(args: &WavesArgs) -> Result<AnalysisReport> {
    let manifest = WavesManifest::load(&args.manifest)?;
    let threshold = args.threshold.or(manifest.threshold).unwrap_or(0.0);
    let mut digests = vec![InputDigest::of(
        args.manifest.display().to_string(),
        &read_bytes(&args.manifest)?,
    )];

    // Technologies are independent; read and analyse them in parallel.
    let outcomes: Vec<Result<(Source, WaveEvents, Option<InputDigest>)>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = manifest
                .technology
                .iter()
                .map(|tech| {
                    let manifest = &manifest;
                    scope.spawn(move || match &tech.file {
                        Some(file) => {
                            let loaded = load_series(&manifest.resolve(file))?;
                            let mut events = extract_wave_events(&loaded.series, threshold)?;
                            events.tech_name = tech.name.clone();
                            Ok((Source::Series(loaded.series), events, Some(loaded.digest)))
                        }
                        None => {
                            let events = WaveEvents::new(
                                tech.name.clone(),
                                tech.begin.expect("manifest validated"),
                                tech.peak.expect("manifest validated"),
                                tech.end,
                            )?;
                            Ok((Source::Explicit, events, None))
                        }
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("wave worker panicked"))
                .collect()
        });

    let mut technologies = Vec::new();
    let mut warnings = Vec::new();
    let mut events_by_name: HashMap<&str, WaveEvents> = HashMap::new();
    let mut series_by_name: HashMap<&str, TimeSeries> = HashMap::new();
    let mut all_events = Vec::new();
    for (tech, outcome) in manifest.technology.iter().zip(outcomes) {
        match outcome {
            Ok((source, events, digest)) => {
                digests.extend(digest);
                if let Source::Series(s) = source {
                    series_by_name.insert(&tech.name, s);
                }
                technologies.push(TechnologyWave {
                    name: tech.name.clone(),
                    metrics: wave_metrics(&events).ok(),
                    marker: if events.is_complete() { "" } else { "*" }.into(),
                    events: Some(events.clone()),
                    error: None,
                });
                events_by_name.insert(&tech.name, events.clone());
                all_events.push(events);
            }
            Err(e) => {
                warnings.push(format!("{}: {e}", tech.name));
                technologies.push(TechnologyWave {
                    name: tech.name.clone(),
                    events: None,
                    metrics: None,
                    marker: String::new(),
                    error: Some(e.to_string()),
                });
            }
        }
    }
    if all_events.is_empty() {
        return Err(Error::Validation(format!(
            "no technology in `{}` yielded a wave: {}",
            manifest.id,
            warnings.join("; ")
        )));
    }
    let summary = summarize_events(&all_events);

    let mut takeovers = Vec::new();
    let mut gap_pairs = Vec::new();
    for pair in &manifest.substitution {
        let (old, new) = (pair.established.as_str(), pair.killer.as_str());
        if let (Some(e_old), Some(e_new)) = (events_by_name.get(old), events_by_name.get(new)) {
            gap_pairs.push((e_old.clone(), e_new.clone()));
        }
        let mut row = TakeoverRow {
            established: old.to_string(),
            killer: new.to_string(),
            takeover: None,
            established_share_pct: None,
            note: None,
        };
        match (series_by_name.get(old), series_by_name.get(new)) {
            (Some(s_old), Some(s_new)) => match takeover_year(s_new, s_old) {
                Ok(Some(t)) => {
                    let total: f64 = series_by_name
                        .values()
                        .filter_map(|s| s.value_at(t.year))
                        .sum();
                    row.established_share_pct = (total > 0.0).then(|| 100.0 * t.old_value / total);
                    row.takeover = Some(t);
                }
                Ok(None) => row.note = Some("never overtaken in the common years".into()),
                Err(e) => row.note = Some(e.to_string()),
            },
            _ => row.note = Some("needs revenue series for both technologies".into()),
        }
        takeovers.push(row);
    }
    let intro_gaps = (!gap_pairs.is_empty()).then(|| intro_gap_diagnostic(&gap_pairs));

    let narrative = match (summary.downwave.mean, summary.downwave.sd) {
        (Some(mean), Some(sd)) => format!(
            "{} completed wave(s): average disruption period {mean:.2} years (SD {sd:.2}); average cycle {:.2} years",
            summary.included,
            summary.cycle.mean.unwrap_or(f64::NAN)
        ),
        (Some(mean), None) => format!(
            "{} completed wave: disruption period {mean:.2} years",
            summary.included
        ),
        _ => "no completed waves".to_string(),
    };

    Ok(AnalysisReport {
        dataset: manifest.id.clone(),
        command: "waves".into(),
        log_base: "e".into(),
        payload: Payload::Waves(WavesReport {
            threshold,
            technologies,
            summary,
            takeovers,
            intro_gaps,
        }),
        narrative,
        provenance: Provenance::new(digests, !args.report.no_timestamp),
        warnings,
    })
}

/// Writes `killer.csv` and `victim.csv`; returns their paths.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let mut spec = SimulationSpec::load(&args.params)?;
    if let Some(range) = args.years {
        spec.first_year = range.first;
        spec.last_year = range.last;
    }
    if let Some(noise) = args.noise {
        spec.noise_sigma = noise;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let (killer, victim) = simulate_pair(&spec)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::io(args.out_dir.display().to_string(), e))?;
    let mut written = Vec::new();
    for (name, series) in [("killer.csv", &killer), ("victim.csv", &victim)] {
        let path = args.out_dir.join(name);
        write_file(&path, &series.to_csv())?;
        written.push(path);
    }
    Ok(written)
}
