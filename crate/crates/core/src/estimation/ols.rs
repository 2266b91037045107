use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use crate::error::{Error, Result};

/// Simple linear regression `y = alpha + beta x` with its inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub alpha: f64,
    pub beta: f64,
    pub se_alpha: f64,
    pub se_beta: f64,
    #[serde(with = "crate::serde_float")]
    pub t_alpha: f64,
    #[serde(with = "crate::serde_float")]
    pub t_beta: f64,
    pub p_value_alpha: f64,
    pub p_value_beta: f64,
    pub r2: f64,
    pub r2_adj: f64,
    /// Residual standard error, `sqrt(SSE / (n - 2))`.
    pub se_estimate: f64,
    pub sse: f64,
    #[serde(with = "crate::serde_float")]
    pub f_stat: f64,
    pub p_value_f: f64,
    pub n: usize,
}

impl RegressionFit {
    pub fn df(&self) -> usize {
        self.n - 2
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.alpha + self.beta * x
    }
}

/// `*` at 5%, `**` at 1%, `***` at 0.1%.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

fn students_t(df: usize) -> StudentsT {
    StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1")
}

/// Two-sided critical value `t(df, 1 - level/2)`.
pub fn t_critical(df: usize, level: f64) -> f64 {
    students_t(df).inverse_cdf(1.0 - level / 2.0)
}

fn ratio(estimate: f64, se: f64) -> f64 {
    if se > 0.0 {
        estimate / se
    } else if estimate == 0.0 {
        0.0
    } else {
        estimate.signum() * f64::INFINITY
    }
}

fn two_sided_p(t: f64, dist: &StudentsT) -> f64 {
    if t.is_infinite() {
        0.0
    } else {
        (2.0 * dist.sf(t.abs())).min(1.0)
    }
}

/// Ordinary least squares of `ys` on `xs`.
pub fn ols_fit(xs: &[f64], ys: &[f64]) -> Result<RegressionFit> {
    if xs.len() != ys.len() {
        return Err(Error::Validation(format!(
            "regression needs equal-length inputs, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Validation("regression inputs must be finite".into()));
    }

    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let sum_x2: f64 = xs.iter().map(|x| x * x).sum();
    if sxx <= f64::EPSILON * f64::EPSILON * sum_x2 || sxx == 0.0 {
        return Err(Error::Degenerate(
            "explanatory variable has zero variance; slope undefined".into(),
        ));
    }

    let beta = sxy / sxx;
    let alpha = mean_y - beta * mean_x;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - alpha - beta * x;
            e * e
        })
        .sum();

    let df = n - 2;
    let dff = df as f64;
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 0.0 };
    let r2_adj = 1.0 - (1.0 - r2) * (nf - 1.0) / dff;
    let s2 = sse / dff;
    let se_beta = (s2 / sxx).sqrt();
    let se_alpha = (s2 * (1.0 / nf + mean_x * mean_x / sxx)).sqrt();

    let t_beta = ratio(beta, se_beta);
    let t_alpha = ratio(alpha, se_alpha);
    let f_stat = t_beta * t_beta;

    let dist = students_t(df);
    let p_value_f = if f_stat.is_infinite() {
        0.0
    } else {
        FisherSnedecor::new(1.0, dff)
            .expect("df >= 1")
            .sf(f_stat)
            .clamp(0.0, 1.0)
    };

    Ok(RegressionFit {
        alpha,
        beta,
        se_alpha,
        se_beta,
        t_alpha,
        t_beta,
        p_value_alpha: two_sided_p(t_alpha, &dist),
        p_value_beta: two_sided_p(t_beta, &dist),
        r2,
        r2_adj,
        se_estimate: s2.sqrt(),
        sse,
        f_stat,
        p_value_f,
        n,
    })
}
