//! Goodness of fit of the skewed t: fit by maximum likelihood, map the data
//! through the fitted CDF and the normal quantile, and apply the
//! Anderson–Darling normality test for estimated mean and variance.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::skewt::{self, fit_mle, Sample, SkewTParams};
use crate::special::{ln_normal_cdf, normal_quantile};

/// Smallest sample the critical-value table is valid for.
pub const MIN_N: usize = 20;

/// PIT values are clamped to `[CLAMP, 1 − CLAMP]` before `Φ⁻¹`.
pub const CLAMP: f64 = 1e-12;

/// Upper critical points of the modified statistic `A*` when mean and
/// variance are estimated, by significance level.
pub const CRITICAL_VALUES: [(f64, f64); 4] = [(0.10, 0.631), (0.05, 0.752), (0.025, 0.873), (0.01, 1.035)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub a_squared: f64,
    pub a_star: f64,
    pub critical_value: f64,
    pub reject: bool,
    pub fitted: SkewTParams,
    /// PIT values that hit the clamp; nonzero means the fit puts data far
    /// into a tail.
    pub clamped: usize,
}

/// Critical value of `A*` at `beta`, interpolated linearly in `ln β`
/// between tabulated levels.
pub fn critical_value(beta: f64) -> Result<f64> {
    let (hi, lo) = (CRITICAL_VALUES[0].0, CRITICAL_VALUES[3].0);
    if !(lo - 1e-12..=hi + 1e-12).contains(&beta) {
        return Err(domain(format!("goodness-of-fit levels must lie in [{lo}, {hi}], got {beta}")));
    }
    for w in CRITICAL_VALUES.windows(2) {
        let ((b0, c0), (b1, c1)) = (w[0], w[1]);
        if beta <= b0 + 1e-12 && beta >= b1 - 1e-12 {
            let t = (beta.ln() - b0.ln()) / (b1.ln() - b0.ln());
            return Ok(c0 + t.clamp(0.0, 1.0) * (c1 - c0));
        }
    }
    unreachable!("level {beta} is inside the table range")
}

/// Anderson–Darling `A²` for normality of `w` given as standardised scores
/// (`u = Φ(w)`), using order statistics in both terms. Tail logs are taken
/// as `ln Φ(±w)` so extreme scores do not round to `ln 0`.
pub fn anderson_darling_normal(w: &[f64]) -> f64 {
    let mut w = w.to_vec();
    w.sort_by(f64::total_cmp);
    let n = w.len() as f64;
    let sum: f64 = w
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = (i + 1) as f64;
            (2.0 * i - 1.0) * ln_normal_cdf(x) + (2.0 * n + 1.0 - 2.0 * i) * ln_normal_cdf(-x)
        })
        .sum();
    -n - sum / n
}

/// `A²` for uniforms `u` directly.
pub fn anderson_darling_uniform(u: &[f64]) -> f64 {
    let mut u = u.to_vec();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let sum: f64 = u
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = (i + 1) as f64;
            (2.0 * i - 1.0) * x.ln() + (2.0 * n + 1.0 - 2.0 * i) * (-x).ln_1p()
        })
        .sum();
    -n - sum / n
}

/// Small-sample modification `A* = A²(1 + 0.75/n + 2.25/n²)`.
pub fn modified(a_squared: f64, n: usize) -> f64 {
    let n = n as f64;
    a_squared * (1.0 + 0.75 / n + 2.25 / (n * n))
}

/// Probability integral transform under `p`, clamped; returns the values
/// and the number clamped.
pub fn pit(data: &Sample, p: &SkewTParams) -> Result<(Vec<f64>, usize)> {
    let mut clamped = 0;
    let v = data
        .values()
        .iter()
        .map(|&x| {
            let v = skewt::cdf(x, p)?;
            if !(CLAMP..=1.0 - CLAMP).contains(&v) {
                clamped += 1;
            }
            Ok(v.clamp(CLAMP, 1.0 - CLAMP))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((v, clamped))
}

/// The test at fixed parameters `p` (no fitting).
pub fn gof_with_params(data: &Sample, p: &SkewTParams, beta: f64) -> Result<GofResult> {
    let n = data.len();
    if n < MIN_N {
        return Err(domain(format!("goodness of fit needs at least {MIN_N} observations, got {n}")));
    }
    let critical = critical_value(beta)?;
    let (v, clamped) = pit(data, p)?;
    let y = Sample::new(v.iter().map(|&v| normal_quantile(v)).collect::<Result<Vec<_>>>()?)?;
    let (mean, sd) = (y.mean(), y.sd());
    if !(sd > 0.0) {
        return Err(domain("normal scores are constant"));
    }
    let w: Vec<f64> = y.values().iter().map(|&y| (y - mean) / sd).collect();
    let a_squared = anderson_darling_normal(&w);
    let a_star = modified(a_squared, n);
    Ok(GofResult { a_squared, a_star, critical_value: critical, reject: a_star > critical, fitted: *p, clamped })
}

/// Fits the skewed t by maximum likelihood and tests the fit at level `beta`.
pub fn gof_skewt(data: &Sample, beta: f64) -> Result<GofResult> {
    critical_value(beta)?;
    if data.len() < MIN_N {
        return Err(domain(format!("goodness of fit needs at least {MIN_N} observations, got {}", data.len())));
    }
    let fit = fit_mle(data)?;
    gof_with_params(data, &fit.params, beta)
}
