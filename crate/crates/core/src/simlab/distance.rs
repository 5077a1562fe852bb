use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::priors::sigma_nu;
use crate::quad::integrate_pieces;
use crate::skewt::{self, SkewTParams};
use crate::special::{normal_pdf, student_t_cdf, student_t_pdf};

const TOL: f64 = 1e-7;

/// Scale reported as optimal for the normal-shaped criterion; the published
/// σ_ν polynomial is compared against it.
pub const KL_REFERENCE_SIGMA: f64 = 1.54;

// ∫ h over ℝ via x = c + s·tan θ, split at a few θ so kinks and the
// bulk of the mass fall near segment ends.
fn integrate_line(h: impl Fn(f64) -> f64, centre: f64, scale: f64) -> Result<f64> {
    let mut breaks = vec![-FRAC_PI_2];
    for k in [-16.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 16.0] {
        breaks.push(f64::atan(k));
    }
    breaks.push(FRAC_PI_2);
    integrate_pieces(
        |t| {
            let c = t.cos();
            if c <= 0.0 {
                return 0.0;
            }
            let v = h(centre + scale * t.tan()) * scale / (c * c);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        &breaks,
        TOL,
    )
}

/// `½∫|f − g|` for two densities on ℝ, assumed to be of roughly unit
/// scale around the origin (see [`tv_distance_on`]).
pub fn tv_distance(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    tv_distance_on(f, g, 0.0, 1.0)
}

/// [`tv_distance`] with the integration grid centred at `centre` with
/// spread `scale`.
pub fn tv_distance_on(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, centre: f64, scale: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(domain(format!("integration scale must be positive, got {scale}")));
    }
    Ok((0.5 * integrate_line(|x| (f(x) - g(x)).abs(), centre, scale)?).clamp(0.0, 1.0))
}

/// Symmetrised Kullback–Leibler divergence `∫(f − g)(log f − log g)`,
/// taking log densities so far tails do not underflow.
pub fn kl_symmetric(ln_f: impl Fn(f64) -> f64, ln_g: impl Fn(f64) -> f64) -> Result<f64> {
    let v = integrate_line(
        |x| {
            let (a, b) = (ln_f(x), ln_g(x));
            if a == b {
                return 0.0;
            }
            (a.exp() - b.exp()) * (a - b)
        },
        0.0,
        1.0,
    )?;
    Ok(v.max(0.0))
}

/// Normal `(μ, σ²)` with the skewed t's mean and variance.
pub fn matched_normal(p: &SkewTParams) -> Result<(f64, f64)> {
    skewt::moments(p)
}

/// TV distance between a skewed t and its moment-matched normal.
pub fn tv_to_matched_normal(p: &SkewTParams) -> Result<f64> {
    let (mu, var) = matched_normal(p)?;
    let sd = var.sqrt();
    tv_distance_on(|x| skewt::pdf(x, p), |x| normal_pdf((x - mu) / sd) / sd, p.xi, p.omega)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaNuRow {
    pub nu: f64,
    pub sigma: f64,
    /// TV between `t(z)/(π√(T(z)(1−T(z))))` and `t(z/σ_ν)/σ_ν`.
    pub tv: f64,
    /// Same distance at σ = [`KL_REFERENCE_SIGMA`].
    pub tv_reference: f64,
    /// Total mass of the exact density (should be 1).
    pub mass_exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaNuReport {
    pub rows: Vec<SigmaNuRow>,
    pub max_tv: f64,
}

/// Checks the published σ_ν polynomial against the density it
/// approximates, on `grid`.
pub fn sigma_nu_validation(grid: &[f64]) -> Result<SigmaNuReport> {
    let mut rows = Vec::with_capacity(grid.len());
    for &nu in grid {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(domain(format!("sigma_nu grid needs positive df, got {nu}")));
        }
        let exact = |z: f64| {
            let t = student_t_pdf(z, nu).unwrap_or(0.0);
            let lower = student_t_cdf(z, nu).unwrap_or(0.5);
            let upper = student_t_cdf(-z, nu).unwrap_or(0.5);
            t / (PI * (lower * upper).sqrt())
        };
        let approx = |sigma: f64| move |z: f64| student_t_pdf(z / sigma, nu).unwrap_or(0.0) / sigma;
        let sigma = sigma_nu(nu);
        rows.push(SigmaNuRow {
            nu,
            sigma,
            tv: tv_distance(exact, approx(sigma))?,
            tv_reference: tv_distance(exact, approx(KL_REFERENCE_SIGMA))?,
            mass_exact: integrate_line(exact, 0.0, 1.0)?,
        });
    }
    let max_tv = rows.iter().map(|r| r.tv).fold(0.0, f64::max);
    Ok(SigmaNuReport { rows, max_tv })
}
