//! The skewed Student t distribution `ST(α, ν, ξ, ω)`:
//! `f(x) = (2/ω) t(z | ν) T(α z √((ν+1)/(ν+z²)) | ν+1)`, `z = (x-ξ)/ω`.

mod cdf;
mod fit;
mod sample;

use std::f64::consts::LN_2;

use rand::Rng as _;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::{rng_from_seed, Rng};
use crate::special::{ln_gamma_ratio, student_t_ln_cdf, student_t_ln_pdf};

pub use fit::{fit_mle, fit_with, initial_guess, FitResult};
pub use sample::Sample;
pub(crate) use sample::quantile_sorted;

/// Parameters of the skewed t: skewness `alpha`, degrees of freedom `nu`,
/// location `xi` and scale `omega`. `nu` and `omega` must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewTParams {
    pub alpha: f64,
    pub nu: f64,
    pub xi: f64,
    pub omega: f64,
}

impl SkewTParams {
    pub fn new(alpha: f64, nu: f64, xi: f64, omega: f64) -> Result<Self> {
        let p = SkewTParams { alpha, nu, xi, omega };
        p.validate()?;
        Ok(p)
    }

    /// Standardised form with `xi = 0`, `omega = 1`.
    pub fn standard(alpha: f64, nu: f64) -> Result<Self> {
        Self::new(alpha, nu, 0.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.xi.is_finite()) {
            return Err(domain(format!("alpha and xi must be finite: {self:?}")));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(domain(format!("nu must be positive and finite, got {}", self.nu)));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(domain(format!("omega must be positive and finite, got {}", self.omega)));
        }
        Ok(())
    }

    pub fn standardize(&self, x: f64) -> f64 {
        (x - self.xi) / self.omega
    }

    pub fn delta(&self) -> f64 {
        self.alpha / (1.0 + self.alpha * self.alpha).sqrt()
    }
}

/// Log density of the standardised skewed t.
pub(crate) fn standard_log_pdf(z: f64, alpha: f64, nu: f64) -> f64 {
    let log_t = student_t_ln_pdf(z, nu).unwrap_or(f64::NAN);
    if alpha == 0.0 {
        return log_t;
    }
    let r = ((nu + 1.0) / (nu + z * z)).sqrt();
    let w = alpha * z * r;
    LN_2 + log_t + student_t_ln_cdf(w, nu + 1.0).unwrap_or(f64::NAN)
}

pub fn log_pdf(x: f64, p: &SkewTParams) -> f64 {
    standard_log_pdf(p.standardize(x), p.alpha, p.nu) - p.omega.ln()
}

pub fn pdf(x: f64, p: &SkewTParams) -> f64 {
    log_pdf(x, p).exp()
}

pub fn cdf(x: f64, p: &SkewTParams) -> Result<f64> {
    p.validate()?;
    if x.is_nan() {
        return Err(domain("cdf of NaN"));
    }
    let (lower, _) = cdf::tails(p.standardize(x), p.alpha, p.nu)?;
    Ok(lower)
}

/// Survival function `1 - F(x)`, accurate in the upper tail.
pub fn sf(x: f64, p: &SkewTParams) -> Result<f64> {
    p.validate()?;
    if x.is_nan() {
        return Err(domain("sf of NaN"));
    }
    let (_, upper) = cdf::tails(p.standardize(x), p.alpha, p.nu)?;
    Ok(upper)
}

pub fn quantile(prob: f64, p: &SkewTParams) -> Result<f64> {
    p.validate()?;
    if !(prob > 0.0 && prob < 1.0) {
        return Err(domain(format!("quantile needs prob in (0, 1), got {prob}")));
    }
    Ok(p.xi + p.omega * cdf::standard_quantile(prob, p.alpha, p.nu)?)
}

/// One draw via `ξ + ω (δ|U₀| + √(1-δ²) U₁) / √V`, `V ~ χ²_ν / ν`.
pub fn draw(p: &SkewTParams, rng: &mut Rng) -> f64 {
    let chi = ChiSquared::new(p.nu).expect("validated nu");
    let delta = p.delta();
    let u0: f64 = rng.sample(StandardNormal);
    let u1: f64 = rng.sample(StandardNormal);
    let mut v: f64 = chi.sample(rng) / p.nu;
    while v <= 0.0 {
        v = chi.sample(rng) / p.nu;
    }
    let s = delta * u0.abs() + (1.0 - delta * delta).sqrt() * u1;
    p.xi + p.omega * s / v.sqrt()
}

pub fn sample_with(p: &SkewTParams, n: usize, rng: &mut Rng) -> Result<Vec<f64>> {
    p.validate()?;
    Ok((0..n).map(|_| draw(p, rng)).collect())
}

pub fn sample(p: &SkewTParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    sample_with(p, n, &mut rng_from_seed(seed))
}

// b_ν = √ν Γ((ν-1)/2) / (√π Γ(ν/2))
fn b_nu(nu: f64) -> f64 {
    (nu / std::f64::consts::PI).sqrt() * (-ln_gamma_ratio(0.5 * (nu - 1.0), 0.5)).exp()
}

pub fn mean(p: &SkewTParams) -> Result<f64> {
    p.validate()?;
    if p.nu <= 1.0 {
        return Err(Error::UndefinedMoment { order: 1, nu: p.nu });
    }
    Ok(p.xi + p.omega * p.delta() * b_nu(p.nu))
}

pub fn variance(p: &SkewTParams) -> Result<f64> {
    p.validate()?;
    if p.nu <= 2.0 {
        return Err(Error::UndefinedMoment { order: 2, nu: p.nu });
    }
    let db = p.delta() * b_nu(p.nu);
    Ok(p.omega * p.omega * (p.nu / (p.nu - 2.0) - db * db))
}

/// `(mean, variance)`.
pub fn moments(p: &SkewTParams) -> Result<(f64, f64)> {
    Ok((mean(p)?, variance(p)?))
}

pub fn log_likelihood(data: &[f64], p: &SkewTParams) -> Result<f64> {
    p.validate()?;
    if data.is_empty() {
        return Err(domain("log likelihood of an empty sample"));
    }
    let ll: f64 = data.iter().map(|&x| log_pdf(x, p)).sum();
    if ll.is_nan() {
        return Err(domain("log likelihood is NaN; data must be finite"));
    }
    Ok(ll)
}
