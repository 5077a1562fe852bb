//! Objective priors for the skewed t: the Jeffreys prior π^J built from a
//! closed-form approximation of the (α, ν) Fisher information, the Branco
//! and Dette priors, and a bounded uniform prior.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::skewt::{fit_with, log_likelihood, FitResult, Sample, SkewTParams};
use crate::special::{digamma, hyp2f1, ln_beta, ln_gamma, ln_gamma_ratio, trigamma};

// σ_ν polynomial in ln ν, highest degree first.
const SIGMA_COEFFS: [f64; 8] = [
    0.000_005_43,
    -0.000_163_03,
    0.001_996_13,
    -0.012_850_16,
    0.046_313_03,
    -0.087_610_23,
    0.050_361_88,
    1.620_211_89,
];
const SIGMA_LARGE_NU: f64 = 1.5536;

/// Bounds of the uniform prior's support box.
pub const UNIFORM_ALPHA_MAX: f64 = 1e4;
pub const UNIFORM_NU_MAX: f64 = 1e4;
pub const UNIFORM_XI_MAX: f64 = 1e6;
pub const UNIFORM_OMEGA_MAX: f64 = 1e6;

const SMALL_ALPHA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorKind {
    /// π^J with the constant `c_nu` standing in for `g(ν,w) / (2 g₁(ν) T(w|ν+1))`.
    Jeffreys { c_nu: f64 },
    Branco,
    Dette,
    Uniform,
}

impl Default for PriorKind {
    fn default() -> Self {
        PriorKind::Jeffreys { c_nu: 1.0 }
    }
}

impl PriorKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PriorKind::Jeffreys { c_nu } if !(0.0..=1.0).contains(&c_nu) => {
                Err(domain(format!("c_nu must lie in [0, 1], got {c_nu}")))
            }
            _ => Ok(()),
        }
    }
}

/// Scale `σ_ν` for which `t(z/σ|ν)/σ` approximates
/// `t(z|ν) / (π √(T(z|ν)(1 - T(z|ν))))`. Values of `ν < 1` are clamped to 1.
pub fn sigma_nu(nu: f64) -> f64 {
    if nu > 2400.0 {
        return SIGMA_LARGE_NU;
    }
    let l = nu.max(1.0).ln();
    SIGMA_COEFFS.iter().fold(0.0, |acc, c| acc * l + c)
}

/// Whether [`sigma_nu`] had to clamp its argument.
pub fn sigma_nu_clamped(nu: f64) -> bool {
    nu < 1.0
}

/// `Γ(ν/2 + 1) / Γ((ν+1)/2)`, on the log scale.
fn ln_gamma_half_step(nu: f64) -> f64 {
    ln_gamma_ratio(0.5 * (nu + 1.0), 0.5)
}

fn check(alpha: f64, nu: f64) -> Result<()> {
    if !alpha.is_finite() || !(nu > 0.0 && nu.is_finite()) {
        return Err(domain(format!("invalid (alpha, nu) = ({alpha}, {nu})")));
    }
    Ok(())
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric(format!("{what} overflowed")))
    }
}

pub fn fisher_i_alpha_alpha(alpha: f64, nu: f64) -> Result<f64> {
    check(alpha, nu)?;
    let s2 = sigma_nu(nu + 1.0).powi(2);
    let c = 0.5 * (nu + 1.0);
    let pref = PI * (2.0 * ln_gamma_half_step(nu)).exp();
    let ratio = if alpha.abs() < SMALL_ALPHA {
        // Two-term Taylor expansion of the ₂F₁ difference in its argument.
        1.0 / (2.0 * c * s2) - 3.0 * (nu + 2.0) * alpha * alpha / (4.0 * c * (c + 1.0) * s2 * s2)
    } else {
        let z = -alpha * alpha / s2;
        (hyp2f1(0.5, nu + 1.0, c, z)? - hyp2f1(0.5, nu + 2.0, c, z)?) / (alpha * alpha)
    };
    finite(pref * ratio, "I_αα")
}

pub fn fisher_i_alpha_nu(alpha: f64, nu: f64) -> Result<f64> {
    check(alpha, nu)?;
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let s2 = sigma_nu(nu + 1.0).powi(2);
    let z = -alpha * alpha / s2;
    let c = 0.5 * (nu + 5.0);
    let h5 = hyp2f1(-0.5, nu + 2.0, c, z)?;
    let h6 = hyp2f1(0.5, nu + 2.0, c, z)?;
    let ln_g = 2.0 * ln_gamma(0.5 * nu + 1.0)? - ln_gamma(0.5 * (nu + 1.0))? - ln_gamma(c)?;
    let pref = -PI * alpha * ln_g.exp() / (8.0 * (alpha * alpha + s2));
    let bracket =
        (nu + 4.0) * h5 - (alpha * alpha * (2.0 * nu + 3.0) + (nu + 3.0) * s2) * h6 / s2;
    finite(pref * bracket, "I_αν")
}

/// `E[h²(w) α² z² (ν+1) / (4(ν+z²)³)]` via H₁–H₄.
fn expected_h_term(alpha: f64, nu: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let s2 = sigma_nu(nu + 1.0).powi(2);
    let z = -alpha * alpha / s2;
    let h1 = hyp2f1(0.5, nu + 1.0, 0.5 * (nu + 3.0), z)?;
    let h2 = hyp2f1(0.5, nu + 2.0, 0.5 * (nu + 3.0), z)?;
    let h3 = hyp2f1(1.5, nu + 1.0, 0.5 * (nu + 5.0), z)?;
    let h4 = hyp2f1(1.5, nu + 2.0, 0.5 * (nu + 5.0), z)?;
    let ln_pref = 2.5 * PI.ln() + ln_gamma(0.5 * nu + 1.0)?
        - (8.0 * nu * nu).ln()
        - ln_gamma(0.5 * (nu + 5.0))?
        - ln_beta(0.5 * nu, 0.5)
        - 2.0 * ln_beta(0.5 * (nu + 1.0), 0.5);
    let comb = (nu + 3.0) * (h1 - h2) - h3 + h4;
    Ok(ln_pref.exp() * comb)
}

pub fn fisher_i_nu_nu(alpha: f64, nu: f64, c_nu: f64) -> Result<f64> {
    check(alpha, nu)?;
    let e_h = expected_h_term(alpha, nu)?;
    let e_log = digamma(0.5 * nu)? - digamma(0.5 * (nu + 1.0))?;
    let e_log2 = e_log * e_log + trigamma(0.5 * nu)? - trigamma(0.5 * (nu + 1.0))?;
    // With B = z²/(ν+z²) ~ Beta(1/2, ν/2) these are 2/(ν(ν+3)) and
    // -2/(ν(ν+1)); the often-quoted 1/(ν²+3ν) and -1/(ν²+ν) are half that.
    let e_q2 = 2.0 / (nu * nu + 3.0 * nu);
    let e_log_q = -2.0 / (nu * nu + nu);
    let g1 = -0.25 * (digamma(0.5 * nu + 1.0)? - digamma(0.5 * (nu + 1.0))?);
    // -ψ(ν/2)/2 + ψ(ν/2 + 1)/2 = 1/ν
    let d = 1.0 / nu + 2.0 * c_nu * g1;
    // The d·E[(z²-1)/(ν+z²)] cross term vanishes: that expectation is zero.
    let i = e_h + 0.25 * e_log2 + 0.25 * e_q2 + d * d + d * e_log + 0.5 * e_log_q;
    finite(i, "I_νν")
}

/// The (α, ν) block of the approximate Fisher information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherBlock {
    pub i_alpha_alpha: f64,
    pub i_nu_nu: f64,
    pub i_alpha_nu: f64,
    pub determinant: f64,
    /// σ_{ν+1} is always evaluated at ν+1 > 1, so this is only set when a
    /// caller asks about ν < 0 territory indirectly; kept for diagnostics.
    pub sigma_clamped: bool,
}

impl FisherBlock {
    pub fn compute(alpha: f64, nu: f64, c_nu: f64) -> Result<Self> {
        let i_aa = fisher_i_alpha_alpha(alpha, nu)?;
        let i_nn = fisher_i_nu_nu(alpha, nu, c_nu)?;
        let i_an = fisher_i_alpha_nu(alpha, nu)?;
        Ok(FisherBlock {
            i_alpha_alpha: i_aa,
            i_nu_nu: i_nn,
            i_alpha_nu: i_an,
            determinant: i_aa * i_nn - i_an * i_an,
            sigma_clamped: sigma_nu_clamped(nu + 1.0),
        })
    }
}

/// `ln π(ν)` for the independence-Jeffreys prior of ν under the Student t.
pub fn ln_prior_nu(nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(domain(format!("nu must be positive, got {nu}")));
    }
    let bracket = if nu >= 200.0 {
        // The direct form cancels catastrophically for large ν.
        prior_nu_bracket_asymptotic(nu)
    } else {
        prior_nu_bracket_direct(nu)?
    };
    if !(bracket > 0.0) {
        return Err(Error::Numeric(format!("π(ν) bracket is not positive at ν = {nu}")));
    }
    Ok(0.5 * (nu / (nu + 3.0)).ln() + 0.5 * bracket.ln())
}

fn prior_nu_bracket_direct(nu: f64) -> Result<f64> {
    Ok(trigamma(0.5 * nu)? - trigamma(0.5 * (nu + 1.0))? - 2.0 * (nu + 3.0) / (nu * (nu + 1.0).powi(2)))
}

fn prior_nu_bracket_asymptotic(nu: f64) -> f64 {
    let e = 1.0 / nu;
    let e4 = e.powi(4);
    e4 * (6.0 + e * (-12.0 + e * (14.0 + e * (-12.0 + e * (22.0 + e * (-60.0 + e * 30.0))))))
}

/// Unnormalised log prior density of `(α, ν, ξ, ω)`.
pub fn log_prior(p: &SkewTParams, kind: &PriorKind) -> Result<f64> {
    p.validate()?;
    kind.validate()?;
    let ln_omega = p.omega.ln();
    match *kind {
        PriorKind::Jeffreys { c_nu } => {
            let block = FisherBlock::compute(p.alpha, p.nu, c_nu)?;
            if !(block.determinant > 0.0) {
                return Err(Error::Numeric(format!(
                    "Fisher determinant {} is not positive at α = {}, ν = {}",
                    block.determinant, p.alpha, p.nu
                )));
            }
            Ok(-ln_omega + 0.5 * block.determinant.ln())
        }
        PriorKind::Branco => {
            let a2 = p.alpha * p.alpha;
            Ok(-ln_omega - 0.75 * (8.0 * a2 + PI * PI).ln() + ln_prior_nu(p.nu)?)
        }
        PriorKind::Dette => {
            let a2 = p.alpha * p.alpha;
            Ok(-ln_omega - PI.ln() - a2.ln_1p() + ln_prior_nu(p.nu)?)
        }
        PriorKind::Uniform => {
            let inside = p.alpha.abs() <= UNIFORM_ALPHA_MAX
                && p.nu <= UNIFORM_NU_MAX
                && p.xi.abs() <= UNIFORM_XI_MAX
                && p.omega <= UNIFORM_OMEGA_MAX;
            Ok(if inside { -ln_omega } else { f64::NEG_INFINITY })
        }
    }
}

pub fn log_posterior(data: &[f64], p: &SkewTParams, kind: &PriorKind) -> Result<f64> {
    let prior = log_prior(p, kind)?;
    if prior == f64::NEG_INFINITY {
        return Ok(prior);
    }
    Ok(log_likelihood(data, p)? + prior)
}

/// Maximum a posteriori fit under `kind`.
pub fn fit_map(data: &Sample, kind: &PriorKind, init: Option<SkewTParams>) -> Result<FitResult> {
    kind.validate()?;
    let values = data.values();
    fit_with(data, |p| log_posterior(values, p, kind).unwrap_or(f64::NEG_INFINITY), init)
}
