//! Least-squares logistic curve fitting.
//!
//! For a fixed capacity `K` the logit `ln((K - v)/v) = a - b t` is linear,
//! so `(a, b)` come from closed-form least squares. That leaves a
//! one-dimensional profile over `K`, searched in log space: a coarse grid
//! locates the basin and golden-section search refines it, scoring each
//! candidate by the squared residuals of the levels themselves.
//!
//! The logit regression is weighted by `(v (K - v) / K)^2`, the squared
//! slope of the level with respect to the logit, so points pinned at the
//! floor or ceiling do not dominate. A damped Gauss-Newton pass on all three
//! parameters then polishes the profile optimum against the level SSE.
//! Time is centred internally to keep the normal equations well conditioned.

use serde::{Deserialize, Serialize};

use super::ols::ols_fit;
use crate::error::{Error, Result};
use crate::ingest::TimeSeries;
use crate::optimize::golden_section;
use crate::substitution::LogisticParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticFitOptions {
    /// Capacity search stops at this multiple of the largest observation.
    pub capacity_upper_factor: f64,
    /// Capacity search starts at `max * (1 + margin)`.
    pub capacity_lower_margin: f64,
    pub grid_points: usize,
    /// Relative width of the final capacity bracket.
    pub tolerance: f64,
}

impl Default for LogisticFitOptions {
    fn default() -> Self {
        LogisticFitOptions {
            capacity_upper_factor: 50.0,
            capacity_lower_margin: 1e-6,
            grid_points: 240,
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub params: LogisticParams,
    /// Sum of squared level residuals at the optimum.
    pub sse: f64,
    /// SSE of a straight line in `t`, the baseline the curve must beat.
    pub linear_sse: f64,
}

/// Observations with time centred on `t0`.
struct Profile<'a> {
    t0: f64,
    ts: &'a [f64],
    vs: &'a [f64],
}

/// Centred parameterisation: `v = exp(log_k) / (1 + exp(c - b (t - t0)))`.
#[derive(Debug, Clone, Copy)]
struct Centred {
    log_k: f64,
    c: f64,
    b: f64,
}

impl Profile<'_> {
    fn level(&self, p: &Centred, t: f64) -> f64 {
        let z = p.c - p.b * (t - self.t0);
        p.log_k.exp() / (1.0 + z.exp())
    }

    fn sse_of(&self, p: &Centred) -> f64 {
        let sse = self
            .ts
            .iter()
            .zip(self.vs)
            .map(|(&t, &v)| {
                let e = v - self.level(p, t);
                e * e
            })
            .sum::<f64>();
        if sse.is_finite() {
            sse
        } else {
            f64::INFINITY
        }
    }

    /// Weighted logit regression for capacity `exp(log_k)`.
    fn evaluate(&self, log_k: f64) -> Option<(Centred, f64)> {
        let k = log_k.exp();
        let (mut sw, mut st, mut sy) = (0.0, 0.0, 0.0);
        let rows: Vec<(f64, f64, f64)> = self
            .ts
            .iter()
            .zip(self.vs)
            .map(|(&t, &v)| {
                let w = (v * (k - v) / k).powi(2);
                (t - self.t0, ((k - v) / v).ln(), w)
            })
            .filter(|(_, y, w)| y.is_finite() && *w > 0.0)
            .collect();
        for &(t, y, w) in &rows {
            sw += w;
            st += w * t;
            sy += w * y;
        }
        if rows.len() < 2 || sw <= 0.0 {
            return None;
        }
        let (tm, ym) = (st / sw, sy / sw);
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for &(t, y, w) in &rows {
            sxx += w * (t - tm) * (t - tm);
            sxy += w * (t - tm) * (y - ym);
        }
        if !(sxx > 0.0) {
            return None;
        }
        let slope = sxy / sxx;
        let p = Centred {
            log_k,
            c: ym - slope * tm,
            b: -slope,
        };
        let sse = self.sse_of(&p);
        (sse.is_finite() && p.b != 0.0).then_some((p, sse))
    }

    fn sse(&self, log_k: f64) -> f64 {
        self.evaluate(log_k).map_or(f64::INFINITY, |(_, sse)| sse)
    }

    /// Levenberg-Marquardt steps on the level SSE; never returns a worse point.
    fn polish(&self, mut p: Centred, mut sse: f64) -> (Centred, f64) {
        let mut lambda = 1e-3;
        for _ in 0..200 {
            let mut jtj = [[0.0f64; 3]; 3];
            let mut jtr = [0.0f64; 3];
            for (&t, &v) in self.ts.iter().zip(self.vs) {
                let f = self.level(&p, t);
                let k = p.log_k.exp();
                let g = f * (1.0 - f / k);
                let row = [f, -g, g * (t - self.t0)];
                let r = v - f;
                for i in 0..3 {
                    jtr[i] += row[i] * r;
                    for j in 0..3 {
                        jtj[i][j] += row[i] * row[j];
                    }
                }
            }
            let mut improved = false;
            while lambda < 1e12 {
                let mut a = jtj;
                for (i, row) in a.iter_mut().enumerate() {
                    row[i] += lambda * jtj[i][i].max(f64::MIN_POSITIVE);
                }
                let Some(d) = solve3(a, jtr) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial = Centred {
                    log_k: p.log_k + d[0],
                    c: p.c + d[1],
                    b: p.b + d[2],
                };
                let trial_sse = self.sse_of(&trial);
                if trial_sse < sse && trial.b != 0.0 {
                    let gain = sse - trial_sse;
                    p = trial;
                    sse = trial_sse;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = gain > 1e-15 * sse.max(f64::MIN_POSITIVE);
                    break;
                }
                lambda *= 10.0;
            }
            if !improved {
                break;
            }
        }
        (p, sse)
    }
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if !(a[pivot][col].abs() > 0.0) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let m = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *x -= m * p;
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

pub fn logistic_fit(series: &TimeSeries) -> Result<LogisticFit> {
    logistic_fit_with(series, &LogisticFitOptions::default())
}

pub fn logistic_fit_with(series: &TimeSeries, options: &LogisticFitOptions) -> Result<LogisticFit> {
    let n = series.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, got: n });
    }
    if series.values().any(|v| v <= 0.0) {
        return Err(Error::Domain(format!(
            "logistic fit of `{}` needs strictly positive values",
            series.name()
        )));
    }
    if !(options.capacity_upper_factor > 1.0 + options.capacity_lower_margin)
        || options.capacity_lower_margin <= 0.0
        || options.grid_points < 3
    {
        return Err(Error::Validation("invalid logistic fit options".into()));
    }

    let ts: Vec<f64> = series.years().map(f64::from).collect();
    let vs: Vec<f64> = series.values().collect();
    let max = vs.iter().copied().fold(f64::MIN, f64::max);
    let min = vs.iter().copied().fold(f64::MAX, f64::min);
    if max == min {
        return Err(Error::Degenerate(format!(
            "series `{}` is constant; no S-shape to fit",
            series.name()
        )));
    }

    let linear_sse = ols_fit(&ts, &vs)?.sse;
    let t0 = ts.iter().sum::<f64>() / n as f64;
    let profile = Profile {
        t0,
        ts: &ts,
        vs: &vs,
    };

    let lo = (max * (1.0 + options.capacity_lower_margin)).ln();
    let hi = (max * options.capacity_upper_factor).ln();
    let steps = options.grid_points - 1;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .collect();
    let scores: Vec<f64> = grid.iter().map(|&u| profile.sse(u)).collect();
    let best = scores
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::NoFit(format!("no capacity fits `{}`", series.name())))?;

    let left = grid[best.saturating_sub(1)];
    let right = grid[(best + 1).min(steps)];
    let refined = golden_section(|u| profile.sse(u), left, right, options.tolerance, 400);
    let log_k = if refined.value <= scores[best] {
        refined.x
    } else {
        grid[best]
    };
    let (start, start_sse) = profile
        .evaluate(log_k)
        .ok_or_else(|| Error::NoFit(format!("no capacity fits `{}`", series.name())))?;
    let (best, sse) = profile.polish(start, start_sse);
    let params = LogisticParams::new(best.log_k.exp(), best.c + best.b * t0, best.b)
        .map_err(|_| Error::NoFit(format!("no capacity fits `{}`", series.name())))?;

    if !(sse < linear_sse) {
        return Err(Error::NoFit(format!(
            "logistic curve does not improve on a straight line for `{}` (SSE {sse} vs {linear_sse})",
            series.name()
        )));
    }
    Ok(LogisticFit {
        params,
        sse,
        linear_sse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::logistic_value;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn sample(params: &LogisticParams, years: impl Iterator<Item = i32>) -> TimeSeries {
        TimeSeries::from_pairs("s", years.map(|y| (y, logistic_value(params, y as f64)))).unwrap()
    }

    fn assert_within(actual: f64, expected: f64, rel: f64) {
        assert!(
            (actual / expected - 1.0).abs() < rel,
            "{actual} not within {rel} of {expected}"
        );
    }

    #[test]
    fn recovers_exact_samples() {
        let truth = LogisticParams::new(100.0, 5.0, 0.5).unwrap();
        let fit = logistic_fit(&sample(&truth, 0..=20)).unwrap();
        assert_within(fit.params.capacity(), 100.0, 0.005);
        assert_within(fit.params.location(), 5.0, 0.005);
        assert_within(fit.params.rate(), 0.5, 0.005);
        assert!(fit.sse < 1e-12);
    }

    #[test]
    fn recovers_decreasing_curve() {
        let truth = LogisticParams::new(80.0, -6.0, -0.4).unwrap();
        let fit = logistic_fit(&sample(&truth, 0..=30)).unwrap();
        assert_within(fit.params.capacity(), 80.0, 0.005);
        assert_within(fit.params.rate(), -0.4, 0.005);
    }

    #[test]
    fn constant_series_rejected() {
        let s = TimeSeries::from_pairs("c", (0..4).map(|y| (y, 5.0))).unwrap();
        assert!(matches!(logistic_fit(&s), Err(Error::Degenerate(_))));
    }

    #[test]
    fn straight_line_rejected() {
        let s = TimeSeries::from_pairs("l", (0..10).map(|y| (y, 1.0 + y as f64))).unwrap();
        assert!(matches!(logistic_fit(&s), Err(Error::NoFit(_))));
    }

    #[test]
    fn input_checks() {
        let short = TimeSeries::from_pairs("s", [(0, 1.0), (1, 2.0), (2, 3.0)]).unwrap();
        assert!(matches!(
            logistic_fit(&short),
            Err(Error::InsufficientData { .. })
        ));
        let zero = TimeSeries::from_pairs("z", [(0, 0.0), (1, 2.0), (2, 3.0), (3, 4.0)]).unwrap();
        assert!(matches!(logistic_fit(&zero), Err(Error::Domain(_))));
    }

    #[test]
    fn noisy_samples_seeded() {
        let truth = LogisticParams::new(100.0, 5.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(20190917);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let s = TimeSeries::from_pairs(
            "noisy",
            (0..30).map(|y| {
                (
                    y,
                    logistic_value(&truth, y as f64) * (1.0 + noise.sample(&mut rng)),
                )
            }),
        )
        .unwrap();
        let fit = logistic_fit(&s).unwrap();
        assert_within(fit.params.capacity(), 100.0, 0.05);
    }
}
