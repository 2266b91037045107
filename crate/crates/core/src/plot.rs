//! Static SVG scatter plots with a fitted line.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

#[derive(Debug, Clone, Default)]
pub struct ScatterPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    /// `(intercept, slope)` of a line drawn across the x range.
    pub line: Option<(f64, f64)>,
    pub annotation: Option<String>,
    /// Dashed vertical marker at `x` with a label.
    pub vertical_marker: Option<(f64, String)>,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Roughly five tick positions at 1/2/5 multiples of a power of ten.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * magnitude);
    let start = (lo / step).ceil() as i64;
    let stop = (hi / step).floor() as i64;
    (start..=stop).map(|i| i as f64 * step).collect()
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub fn render_svg(plot: &ScatterPlot) -> String {
    let finite: Vec<(f64, f64)> = plot
        .points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (x0, x1) = padded_range(
        finite.iter().map(|p| p.0).chain(
            plot.vertical_marker
                .as_ref()
                .map(|m| m.0)
                .filter(|x| x.is_finite()),
        ),
    );
    let line_ys = plot
        .line
        .map(|(a, b)| vec![a + b * x0, a + b * x1])
        .unwrap_or_default();
    let (y0, y1) = padded_range(finite.iter().map(|p| p.1).chain(line_ys));

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&plot.title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    svg.push_str("<g class=\"ticks\" stroke=\"#ccc\">\n");
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" stroke="none" fill="black">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 16.0,
            fmt_tick(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/><text x="{:.2}" y="{:.2}" text-anchor="end" stroke="none" fill="black">{}</text>"#,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    svg.push_str("</g>\n");

    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + plot_h / 2.0,
        escape(&plot.y_label)
    );

    if let Some((a, b)) = plot.line {
        let _ = writeln!(
            svg,
            r##"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="2"/>"##,
            sx(x0),
            sy(a + b * x0),
            sx(x1),
            sy(a + b * x1)
        );
    }
    if let Some((x, label)) = &plot.vertical_marker {
        if x.is_finite() {
            let _ = writeln!(
                svg,
                r##"<line class="marker" x1="{:.2}" y1="{TOP}" x2="{:.2}" y2="{:.2}" stroke="#2c3e50" stroke-dasharray="4 3"/><text x="{:.2}" y="{:.2}">{}</text>"##,
                sx(*x),
                sx(*x),
                TOP + plot_h,
                sx(*x) + 4.0,
                TOP + 14.0,
                escape(label)
            );
        }
    }

    svg.push_str("<g class=\"observations\" fill=\"#2471a3\">\n");
    for (x, y) in &finite {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5"/>"#,
            sx(*x),
            sy(*y)
        );
    }
    svg.push_str("</g>\n");

    if let Some(note) = &plot.annotation {
        let _ = writeln!(
            svg,
            r#"<text class="annotation" x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT + 10.0,
            TOP + 18.0,
            escape(note)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_circle_per_point_and_escaped_text() {
        let plot = ScatterPlot {
            title: "A & B <test>".into(),
            x_label: "ln V".into(),
            y_label: "ln Kl".into(),
            points: vec![(0.0, 1.0), (1.0, 2.0), (2.0, 3.5)],
            line: Some((1.0, 1.2)),
            annotation: Some("B = 1.2".into()),
            vertical_marker: None,
        };
        let svg = render_svg(&plot);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("A &amp; B &lt;test&gt;"));
        assert!(svg.contains("B = 1.2"));
    }

    #[test]
    fn tick_spacing() {
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        let t = ticks(1990.0, 2018.0);
        assert!(t.len() >= 3 && t.len() <= 7, "{t:?}");
    }

    #[test]
    fn degenerate_ranges_do_not_panic() {
        let svg = render_svg(&ScatterPlot {
            points: vec![(1.0, 1.0)],
            ..Default::default()
        });
        assert!(svg.contains("<circle"));
        let empty = render_svg(&ScatterPlot::default());
        assert!(empty.ends_with("</svg>\n"));
    }
}
