//! Independent oracles shared by the integration tests and the acceptance
//! target: plain adaptive Simpson quadrature and textbook definitions,
//! sharing nothing with the library's closed forms beyond t pdf/cdf.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use bigpast::priors::sigma_nu;
use bigpast::special::{student_t_cdf, student_t_pdf};

fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

/// `∫ₐᵇ f` to relative accuracy `rel`.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> f64 {
    // A fixed pre-split keeps the recursion from stopping on a lucky
    // coarse estimate; its sum also sets the absolute tolerance.
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    let coarse: f64 = (0..=pieces).map(|k| f(a + k as f64 * h).abs()).sum::<f64>() * h;
    let eps = rel * coarse.max(f64::MIN_POSITIVE);
    (0..pieces)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_step(&f, lo, hi, fa, fm, fb, whole, eps / pieces as f64, 30)
        })
        .sum()
}

fn tan_sub(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        let c = t.cos();
        if c <= 1e-300 {
            return 0.0;
        }
        let v = f(t.tan()) / (c * c);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }
}

/// `∫₀^∞ f`.
pub fn half_line(f: impl Fn(f64) -> f64, rel: f64) -> f64 {
    simpson(tan_sub(f), 0.0, FRAC_PI_2, rel)
}

/// `∫ f` over ℝ.
pub fn line(f: impl Fn(f64) -> f64, rel: f64) -> f64 {
    simpson(tan_sub(f), -FRAC_PI_2, FRAC_PI_2, rel)
}

fn t(x: f64, df: f64) -> f64 {
    student_t_pdf(x, df).unwrap()
}

fn tc(x: f64, df: f64) -> f64 {
    student_t_cdf(x, df).unwrap()
}

fn r(z: f64, nu: f64) -> f64 {
    ((nu + 1.0) / (nu + z * z)).sqrt()
}

/// Exact `E[(∂ℓ/∂α)²]` for the standard skewed t, folded onto `z > 0`.
pub fn exact_i_aa(alpha: f64, nu: f64) -> f64 {
    half_line(
        |z| {
            let rr = r(z, nu);
            let w = alpha * z * rr;
            let (tw, big) = (t(w, nu + 1.0), tc(w, nu + 1.0));
            2.0 * z * z * rr * rr * t(z, nu) * tw * tw / (big * (1.0 - big))
        },
        1e-10,
    )
}

/// The same integral with `t²(w)/(T(1−T))` replaced by its σ-scaled
/// approximation `π² t²(w/σ)/σ²`, σ = σ_{ν+1}.
pub fn approx_i_aa(alpha: f64, nu: f64) -> f64 {
    let s = sigma_nu(nu + 1.0);
    half_line(
        |z| {
            let rr = r(z, nu);
            let tw = t(alpha * z * rr / s, nu + 1.0);
            2.0 * z * z * rr * rr * t(z, nu) * PI * PI * tw * tw / (s * s)
        },
        1e-10,
    )
}

/// `−E[h²(w) α z² (ν+1) / (2(ν+z²)²)]` with `h = t(w|ν+1)/T(w|ν+1)`.
pub fn exact_i_an(alpha: f64, nu: f64) -> f64 {
    -half_line(
        |z| {
            let rr = r(z, nu);
            let w = alpha * z * rr;
            let (tw, big) = (t(w, nu + 1.0), tc(w, nu + 1.0));
            let q = nu + z * z;
            2.0 * t(z, nu) * tw * tw / (big * (1.0 - big)) * alpha * z * z * (nu + 1.0) / (2.0 * q * q)
        },
        1e-10,
    )
}

pub fn approx_i_an(alpha: f64, nu: f64) -> f64 {
    let s = sigma_nu(nu + 1.0);
    -half_line(
        |z| {
            let rr = r(z, nu);
            let tw = t(alpha * z * rr / s, nu + 1.0);
            let q = nu + z * z;
            2.0 * t(z, nu) * PI * PI * tw * tw / (s * s) * alpha * z * z * (nu + 1.0) / (2.0 * q * q)
        },
        1e-10,
    )
}

/// Standard skewed-t log density, written out from its definition.
pub fn ln_skewt(z: f64, alpha: f64, nu: f64) -> f64 {
    (2.0 * t(z, nu) * tc(alpha * z * r(z, nu), nu + 1.0)).ln()
}

/// Exact `E[(∂ℓ/∂ν)²]`, with the score by central differences of the log
/// density in ν.
pub fn exact_i_nn(alpha: f64, nu: f64) -> f64 {
    let h = 1e-4 * nu.max(1.0);
    line(
        |z| {
            let score = (ln_skewt(z, alpha, nu + h) - ln_skewt(z, alpha, nu - h)) / (2.0 * h);
            ln_skewt(z, alpha, nu).exp() * score * score
        },
        1e-10,
    )
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// CDF of Gamma(3, 1).
pub fn gamma3_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - (-x).exp() * (1.0 + x + 0.5 * x * x)
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// σ-approximated `E[h²(w) α² z² (ν+1) / (4(ν+z²)³)]`, the only
/// α-dependent part of `I_νν`.
pub fn approx_h_term(alpha: f64, nu: f64) -> f64 {
    let s = sigma_nu(nu + 1.0);
    half_line(
        |z| {
            let rr = r(z, nu);
            let tw = t(alpha * z * rr / s, nu + 1.0);
            let q = nu + z * z;
            2.0 * t(z, nu) * PI * PI * tw * tw / (s * s) * alpha * alpha * z * z * (nu + 1.0) / (4.0 * q * q * q)
        },
        1e-10,
    )
}

/// Gamma(3, 1) on ν, the only free coordinate: exercises the truncated
/// proposal and its Hastings correction near the boundary.
pub fn gamma_chain(seed: u64) -> Vec<f64> {
    use bigpast::mh::{run_chain_with, FreeParams, MhConfig};
    let cfg = MhConfig { m0: 400_000, burn_in: 0.05, step: 2.0, seed, ..MhConfig::default() };
    let free = FreeParams { alpha: false, nu: true, xi: false, omega: false };
    let init = bigpast::SkewTParams::new(0.0, 3.0, 0.0, 1.0).unwrap();
    let chain = run_chain_with(|p| Ok(2.0 * p.nu.ln() - p.nu), init, &cfg, free).unwrap();
    chain.component(|p| p.nu)
}
