use std::f64::consts::PI;

use super::beta::{ibeta_xy, inv_reg_inc_beta, ln_ibeta_xy};
use super::gamma::ln_gamma_ratio;
use super::normal::{ln_normal_cdf, normal_cdf, normal_quantile};
use crate::error::{domain, Result};

// Beyond this the continued fraction gets slow and the normal-corrected
// approximation is exact to double precision.
const LARGE_DF: f64 = 1e7;

fn check_df(df: f64) -> Result<()> {
    if !(df > 0.0) || df.is_infinite() {
        return Err(domain(format!("degrees of freedom must be positive and finite, got {df}")));
    }
    Ok(())
}

pub(crate) fn ln_pdf(x: f64, df: f64) -> f64 {
    ln_gamma_ratio(0.5 * df, 0.5) - 0.5 * (df * PI).ln() - 0.5 * (df + 1.0) * (x * x / df).ln_1p()
}

/// Lower-tail mass `P(T <= -|x|)`.
fn lower_tail(x: f64, df: f64) -> f64 {
    let x2 = x * x;
    if df > LARGE_DF {
        return normal_cdf(-large_df_z(x.abs(), df));
    }
    let (u, v) = split(x2, df);
    0.5 * ibeta_xy(0.5 * df, 0.5, u, v)
}

fn large_df_z(x: f64, df: f64) -> f64 {
    x * (1.0 - 0.25 / df) / (1.0 + 0.5 * x * x / df).sqrt()
}

// (df/(df+x²), x²/(df+x²)) computed without cancellation.
fn split(x2: f64, df: f64) -> (f64, f64) {
    if x2 > 1e250 {
        (df / x2, 1.0)
    } else {
        (df / (df + x2), x2 / (df + x2))
    }
}

pub(crate) fn cdf(x: f64, df: f64) -> f64 {
    let tail = lower_tail(x, df);
    if x < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

pub(crate) fn ln_cdf(x: f64, df: f64) -> f64 {
    if x >= 0.0 {
        return (-lower_tail(x, df)).ln_1p();
    }
    if df > LARGE_DF {
        return ln_normal_cdf(-large_df_z(-x, df));
    }
    let (u, v) = split(x * x, df);
    0.5f64.ln() + ln_ibeta_xy(0.5 * df, 0.5, u, v)
}

pub fn student_t_ln_pdf(x: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    Ok(ln_pdf(x, df))
}

pub fn student_t_pdf(x: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    Ok(ln_pdf(x, df).exp())
}

pub fn student_t_cdf(x: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if x.is_nan() {
        return Err(domain("student t cdf of NaN"));
    }
    Ok(cdf(x, df))
}

/// `ln T(x | df)` without underflow in the lower tail.
pub fn student_t_ln_cdf(x: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if x.is_nan() {
        return Err(domain("student t cdf of NaN"));
    }
    Ok(ln_cdf(x, df))
}

pub fn student_t_quantile(p: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(format!("probability must lie in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p == 1.0 {
        return Ok(f64::INFINITY);
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return Ok(-lower_quantile(1.0 - p, df)?);
    }
    lower_quantile(p, df)
}

// Quantile for p < 1/2 (a negative value).
fn lower_quantile(p: f64, df: f64) -> Result<f64> {
    let mut t = if df > LARGE_DF {
        normal_quantile(p)?
    } else if p < 0.25 {
        // 2p = I_u(df/2, 1/2) with u = df/(df+t²)
        let u = inv_reg_inc_beta(0.5 * df, 0.5, 2.0 * p)?;
        if u == 0.0 {
            f64::NEG_INFINITY
        } else {
            -(df * (1.0 - u) / u).sqrt()
        }
    } else {
        // 1 - 2p = I_v(1/2, df/2) with v = t²/(df+t²)
        let v = inv_reg_inc_beta(0.5, 0.5 * df, 1.0 - 2.0 * p)?;
        -(df * v / (1.0 - v)).sqrt()
    };
    if !t.is_finite() {
        // Beyond double range for the beta inverse; use the tail asymptote
        // P(T < t) ≈ C |t|^{-df}.
        let ln_c = ln_gamma_ratio(0.5 * df, 0.5) - 0.5 * (df * PI).ln() + 0.5 * (df + 1.0) * df.ln()
            - df.ln();
        t = -((ln_c - p.ln()) / df).exp();
    }
    // Newton polish in log space.
    let ln_p = p.ln();
    for _ in 0..3 {
        let lc = ln_cdf(t, df);
        let step = (lc - ln_p) * (lc - ln_pdf(t, df)).exp();
        if !step.is_finite() {
            break;
        }
        t -= step;
        if step.abs() <= 1e-15 * t.abs() {
            break;
        }
    }
    Ok(t)
}
