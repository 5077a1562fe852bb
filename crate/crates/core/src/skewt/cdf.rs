//! Distribution function by quadrature after the substitution
//! `z = √ν tan θ`, which maps the t kernel onto `cos^{ν-1} θ` on a finite range.

use std::f64::consts::FRAC_PI_2;

use crate::error::Result;
use crate::quad::integrate;
use crate::special::{ln_beta, student_t_cdf, student_t_quantile};

const TAIL_TOL: f64 = 1e-13;

struct Integrand {
    nu: f64,
    lambda: f64,
    norm: f64,
}

impl Integrand {
    fn new(alpha: f64, nu: f64) -> Self {
        Integrand {
            nu,
            lambda: alpha * (nu + 1.0).sqrt(),
            // 2 / B(ν/2, 1/2)
            norm: 2.0 * (-ln_beta(0.5 * nu, 0.5)).exp(),
        }
    }

    fn skew(&self, sin_theta: f64) -> f64 {
        if self.lambda == 0.0 {
            return 0.5;
        }
        student_t_cdf(self.lambda * sin_theta, self.nu + 1.0).unwrap_or(f64::NAN)
    }

    // Integrand in θ: cos^{ν-1} θ · T(λ sin θ | ν+1).
    fn at(&self, theta: f64) -> f64 {
        let half = (0.5 * theta).sin();
        let ln_cos = (-2.0 * half * half).ln_1p();
        ((self.nu - 1.0) * ln_cos).exp() * self.skew(theta.sin())
    }

    // Same integrand at distance φ from the endpoint ±π/2 after φ = u^{1/ν},
    // which removes the cos^{ν-1} singularity when ν < 1.
    fn at_endpoint(&self, u: f64, side: f64) -> f64 {
        if u <= 0.0 {
            return self.skew(side) / self.nu;
        }
        let phi = u.powf(1.0 / self.nu);
        let ratio = phi.sin() / phi;
        ratio.powf(self.nu - 1.0) * self.skew(side * phi.cos()) / self.nu
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = vec![0.0];
        let s = self.nu.sqrt();
        for k in [0.25, 1.0, 4.0, 16.0, 64.0] {
            let t = (k / s).atan();
            pts.push(t);
            pts.push(-t);
        }
        let l = self.lambda.abs();
        for j in [1.0, 2.0, 4.0, 8.0] {
            if j < l {
                let t = (j / l).asin();
                pts.push(t);
                pts.push(-t);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// ∫ over [a, b] ⊂ [-π/2, π/2], split at the breakpoints.
    fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let mut edges = vec![a];
        edges.extend(self.breakpoints().into_iter().filter(|&t| t > a && t < b));
        edges.push(b);
        let pieces = (edges.len() - 1) as f64;
        let tol = TAIL_TOL / (self.norm * pieces);
        let mut total = 0.0;
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if self.nu < 1.0 && lo == -FRAC_PI_2 {
                let u_max = (hi + FRAC_PI_2).powf(self.nu);
                total += integrate(|u| self.at_endpoint(u, -1.0), 0.0, u_max, tol)?;
            } else if self.nu < 1.0 && hi == FRAC_PI_2 {
                let u_max = (FRAC_PI_2 - lo).powf(self.nu);
                total += integrate(|u| self.at_endpoint(u, 1.0), 0.0, u_max, tol)?;
            } else {
                total += integrate(|t| self.at(t), lo, hi, tol)?;
            }
        }
        Ok(self.norm * total)
    }
}

/// `(F(z), 1 - F(z))` for the standardised skewed t, computing the smaller
/// tail directly so that both are accurate in relative terms.
pub(super) fn tails(z: f64, alpha: f64, nu: f64) -> Result<(f64, f64)> {
    if z == f64::NEG_INFINITY {
        return Ok((0.0, 1.0));
    }
    if z == f64::INFINITY {
        return Ok((1.0, 0.0));
    }
    let f = Integrand::new(alpha, nu);
    let theta = (z / nu.sqrt()).atan();
    // Integrate the side that is probably the smaller tail; fall back to the
    // other side if it turns out to hold more than half the mass.
    if z <= 0.0 {
        let lower = f.integral(-FRAC_PI_2, theta)?.clamp(0.0, 1.0);
        if lower <= 0.5 {
            return Ok((lower, 1.0 - lower));
        }
        let upper = f.integral(theta, FRAC_PI_2)?.clamp(0.0, 1.0);
        Ok((1.0 - upper, upper))
    } else {
        let upper = f.integral(theta, FRAC_PI_2)?.clamp(0.0, 1.0);
        if upper <= 0.5 {
            return Ok((1.0 - upper, upper));
        }
        let lower = f.integral(-FRAC_PI_2, theta)?.clamp(0.0, 1.0);
        Ok((lower, 1.0 - lower))
    }
}

/// Quantile of the standardised skewed t.
///
/// Because `T(·) <= 1`, `F(z) <= 2 T(z|ν)` and `1 - F(z) <= 2(1 - T(z|ν))`, so the
/// root is bracketed by the t quantiles at `p/2` and `(1+p)/2`.
pub(super) fn standard_quantile(p: f64, alpha: f64, nu: f64) -> Result<f64> {
    let mut lo = student_t_quantile(0.5 * p, nu)?;
    let mut hi = student_t_quantile(0.5 * (1.0 + p), nu)?;
    let upper_side = p > 0.5;
    let target = if upper_side { 1.0 - p } else { p };
    // Signed mismatch, increasing in z.
    let mismatch = |z: f64| -> Result<f64> {
        let (l, u) = tails(z, alpha, nu)?;
        Ok(if upper_side { target - u } else { l - target })
    };

    let mut z = start_point(alpha, lo, hi);
    for _ in 0..200 {
        let m = mismatch(z)?;
        if m == 0.0 {
            return Ok(z);
        }
        if m < 0.0 {
            lo = z;
        } else {
            hi = z;
        }
        if m.abs() <= 1e-14 * target || (hi - lo) <= 1e-15 * z.abs().max(1e-300) {
            return Ok(z);
        }
        let dens = super::standard_log_pdf(z, alpha, nu).exp();
        let mut next = z - m / dens;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = bisect(lo, hi);
        }
        z = next;
    }
    Ok(z)
}

fn bisect(lo: f64, hi: f64) -> f64 {
    // Geometric steps when the bracket spans many orders of magnitude.
    if lo > 0.0 && hi > 1e3 * lo {
        (lo * hi).sqrt()
    } else if hi < 0.0 && lo < 1e3 * hi {
        -(lo * hi).sqrt()
    } else {
        0.5 * (lo + hi)
    }
}

// Newton start inside the bracket, leaning towards the heavy side.
fn start_point(alpha: f64, lo: f64, hi: f64) -> f64 {
    let z = if alpha >= 0.0 { 0.75 * hi + 0.25 * lo } else { 0.25 * hi + 0.75 * lo };
    if z > lo && z < hi {
        z
    } else {
        0.5 * (lo + hi)
    }
}
