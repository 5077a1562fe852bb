use std::f64::consts::PI;

use crate::error::{domain, Result};

const LANCZOS_G: f64 = 607.0 / 128.0;

// Godfrey's coefficients for g = 607/128.
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_7e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain(format!("ln_gamma needs a positive finite argument, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

/// Unchecked `ln Γ(x)` for positive `x`.
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the Lanczos sum away from its poles.
        return (PI / sin_pi(x)).ln() - ln_gamma_pos(1.0 - x);
    }
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1).rev() {
        sum += c / (x + i as f64);
    }
    let tmp = x + LANCZOS_G + 0.5;
    (x + 0.5) * tmp.ln() - tmp + HALF_LN_2PI + (sum / x).ln()
}

/// `Γ(x)` as `(sign, ln|Γ(x)|)`, or `None` at the poles `x = 0, -1, -2, ...`.
pub fn gamma_signed(x: f64) -> Option<(f64, f64)> {
    if x > 0.0 {
        return Some((1.0, ln_gamma_pos(x)));
    }
    if x == x.floor() || !x.is_finite() {
        return None;
    }
    let s = sin_pi(x);
    Some((s.signum(), PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x)))
}

/// `sin(πx)` with exact argument reduction.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    let (sign, r) = if r >= 1.0 { (-1.0, r - 1.0) } else { (1.0, r) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

// Tail of Stirling's series for ln Γ.
fn stirling_tail(y: f64) -> f64 {
    let r = 1.0 / y;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0
                    + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360_360.0 + r2 / 156.0))))))
}

/// `ln Γ(x + h) - ln Γ(x)` without cancellation for large `x`.
pub fn ln_gamma_ratio(x: f64, h: f64) -> f64 {
    if x >= 10.0 && x + h >= 10.0 {
        (x - 0.5) * (h / x).ln_1p() + h * (x + h).ln() - h + stirling_tail(x + h)
            - stirling_tail(x)
    } else {
        ln_gamma_pos(x + h) - ln_gamma_pos(x)
    }
}

/// Digamma `ψ(x)`; defined away from the non-positive integers.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || (x <= 0.0 && x == x.floor()) {
        return Err(domain(format!("digamma has a pole at {x}")));
    }
    if x < 0.0 {
        // ψ(x) = ψ(1 - x) - π cot(πx)
        let s = sin_pi(x);
        let c = sin_pi(x + 0.5);
        return Ok(digamma(1.0 - x)? - PI * c / s);
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r2 = 1.0 / (x * x);
    let series = r2
        * (1.0 / 12.0
            - r2 * (1.0 / 120.0
                - r2 * (1.0 / 252.0
                    - r2 * (1.0 / 240.0
                        - r2 * (1.0 / 132.0 - r2 * (691.0 / 32_760.0 - r2 / 12.0))))));
    Ok(acc + x.ln() - 0.5 / x - series)
}

/// Trigamma `ψ₁(x)` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain(format!("trigamma needs a positive finite argument, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    let series = r
        + r2 / 2.0
        + r * r2
            * (1.0 / 6.0
                - r2 * (1.0 / 30.0
                    - r2 * (1.0 / 42.0
                        - r2 * (1.0 / 30.0 - r2 * (5.0 / 66.0 - r2 * (691.0 / 2730.0))))));
    Ok(acc + series)
}
