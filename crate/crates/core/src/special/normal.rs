use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// Standard normal CDF `Φ(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(x)` without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `ln Φ(x)`, accurate deep into the lower tail.
pub fn ln_normal_cdf(x: f64) -> f64 {
    if x > 0.0 {
        (-normal_sf(x)).ln_1p()
    } else if x > -35.0 {
        normal_cdf(x).ln()
    } else {
        // Asymptotic Mills-ratio expansion; erfc is subnormal out here.
        let r = 1.0 / (x * x);
        let series =
            1.0 - r * (1.0 - r * (3.0 - r * (15.0 - r * (105.0 - r * (945.0 - r * 10395.0)))));
        -0.5 * x * x - (-x).ln() - LN_SQRT_2PI + series.ln()
    }
}

/// Standard normal quantile `Φ⁻¹(p)`, accurate to near machine precision.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(format!("probability must lie in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p == 1.0 {
        return Ok(f64::INFINITY);
    }
    if p > 0.5 {
        // Refine against the smaller tail.
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

// Acklam's rational approximation followed by one Halley step.
fn lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(-5.0) - 2.866_515_718_791_933e-7).abs() < 1e-20);
        assert!((normal_quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-14);
        assert!((normal_quantile(0.05).unwrap() + 1.644_853_626_951_472_2).abs() < 1e-14);
    }

    #[test]
    fn quantile_inverts_cdf_in_tails() {
        for &p in &[1e-300, 1e-50, 1e-10, 0.01, 0.3, 0.5, 0.8, 0.999] {
            let x = normal_quantile(p).unwrap();
            assert!(((normal_cdf(x) - p) / p).abs() < 1e-13, "p={p}");
        }
    }

    #[test]
    fn log_cdf_is_continuous_across_branches() {
        for &x in &[-35.0f64, 0.0] {
            let lo = ln_normal_cdf(x - 1e-9);
            let hi = ln_normal_cdf(x + 1e-9);
            assert!((lo - hi).abs() < 1e-8 * lo.abs().max(1e-6), "x={x}: {lo} vs {hi}");
        }
        assert!(ln_normal_cdf(-1e5).is_finite());
        assert!((ln_normal_cdf(-3.0) - normal_cdf(-3.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn quantile_domain() {
        assert!(normal_quantile(1.1).is_err());
        assert_eq!(normal_quantile(0.0).unwrap(), f64::NEG_INFINITY);
    }
}
