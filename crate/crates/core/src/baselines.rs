//! Comparison tests: z score, Crawford–Howell t, Crawford–Garthwaite
//! Bayesian test, a rank-based nonparametric tail test, and the arcsinh
//! transform wrapper.

use rand::Rng as _;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::rng_from_seed;
use crate::single_subject::{check_beta, tail_levels, Alternative, CredibleInterval, Method, RegionFit, TestResult};
use crate::skewt::Sample;
use crate::special::{normal_cdf, normal_quantile, student_t_quantile};

pub const CG_DEFAULT_DRAWS: usize = 10_000;

/// Smallest control group the rank test accepts.
pub const AD_MIN_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSummary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl GaussianSummary {
    pub fn new(mean: f64, sd: f64, n: usize) -> Result<Self> {
        if !mean.is_finite() {
            return Err(domain(format!("mean must be finite, got {mean}")));
        }
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(domain(format!("standard deviation must be positive, got {sd}")));
        }
        if n < 2 {
            return Err(domain(format!("need at least 2 controls, got {n}")));
        }
        Ok(GaussianSummary { mean, sd, n })
    }

    pub fn from_sample(data: &Sample) -> Result<Self> {
        Self::new(data.mean(), data.sd(), data.len())
    }
}

fn cuts(beta: f64, alt: Alternative, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    check_beta(beta)?;
    let (a, b) = tail_levels(beta, alt);
    let lo = if alt == Alternative::Greater { f64::NEG_INFINITY } else { f(a)? };
    let hi = if alt == Alternative::Less { f64::INFINITY } else { f(1.0 - b)? };
    Ok((lo, hi))
}

/// `(x* − x̄)/s` against normal critical values.
pub fn z_region(summ: &GaussianSummary, beta: f64, alt: Alternative) -> Result<RegionFit> {
    let s = GaussianSummary::new(summ.mean, summ.sd, summ.n)?;
    let (lo, hi) = cuts(beta, alt, |q| Ok(s.mean + s.sd * normal_quantile(q)?))?;
    Ok(RegionFit::plain(Method::Z, CredibleInterval::from_cuts(lo, hi, beta, alt)))
}

/// Crawford–Howell: `(x* − x̄)/(s√((n+1)/n))` against `t` with `n − 1` df.
pub fn crawford_t_region(summ: &GaussianSummary, beta: f64, alt: Alternative) -> Result<RegionFit> {
    let s = GaussianSummary::new(summ.mean, summ.sd, summ.n)?;
    let n = s.n as f64;
    let scale = s.sd * ((n + 1.0) / n).sqrt();
    let (lo, hi) = cuts(beta, alt, |q| Ok(s.mean + scale * student_t_quantile(q, n - 1.0)?))?;
    Ok(RegionFit::plain(Method::T, CredibleInterval::from_cuts(lo, hi, beta, alt)))
}

pub fn z_score(subject: f64, summ: &GaussianSummary, beta: f64, alt: Alternative) -> Result<TestResult> {
    Ok(z_region(summ, beta, alt)?.decide(subject))
}

pub fn crawford_t(subject: f64, summ: &GaussianSummary, beta: f64, alt: Alternative) -> Result<TestResult> {
    Ok(crawford_t_region(summ, beta, alt)?.decide(subject))
}

/// Posterior draws `(μ, σ)` of the Crawford–Garthwaite normal model:
/// `σ² = (n−1)s²/χ²ₙ₋₁`, `μ ~ N(x̄, σ²/n)`.
fn cg_draws(data: &Sample, draws: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let n = data.len();
    if n < 3 {
        return Err(domain(format!("the Crawford–Garthwaite test needs at least 3 controls, got {n}")));
    }
    if draws == 0 {
        return Err(domain("the Crawford–Garthwaite test needs at least one draw"));
    }
    let summ = GaussianSummary::from_sample(data)?;
    let df = (n - 1) as f64;
    let chi = ChiSquared::new(df).map_err(|e| domain(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    Ok((0..draws)
        .map(|_| {
            let sigma = summ.sd * (df / chi.sample(&mut rng)).sqrt();
            let z: f64 = rng.sample(StandardNormal);
            (summ.mean + sigma / (n as f64).sqrt() * z, sigma)
        })
        .collect())
}

// Posterior-averaged lower tail probability of x.
fn cg_tail(draws: &[(f64, f64)], x: f64) -> f64 {
    draws.iter().map(|&(mu, sigma)| normal_cdf((x - mu) / sigma)).sum::<f64>() / draws.len() as f64
}

// Solves cg_tail(x) = target; cg_tail is continuous and strictly increasing.
fn cg_cut(draws: &[(f64, f64)], target: f64, centre: f64, scale: f64) -> Result<f64> {
    let f = |x: f64| cg_tail(draws, x) - target;
    let (mut lo, mut hi) = (centre - scale, centre + scale);
    let mut width = scale;
    for _ in 0..200 {
        if f(lo) <= 0.0 {
            break;
        }
        width *= 2.0;
        lo = centre - width;
    }
    width = scale;
    for _ in 0..200 {
        if f(hi) >= 0.0 {
            break;
        }
        width *= 2.0;
        hi = centre + width;
    }
    if !(f(lo) <= 0.0 && f(hi) >= 0.0) {
        return Err(Error::Numeric(format!("cannot bracket the CG tail level {target}")));
    }
    let tol = 1e-10 * scale;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Crawford–Garthwaite region: the subject is rejected when its
/// posterior-averaged tail probability falls below the level (two-sided:
/// below `β/2` on either side, i.e. twice the smaller tail below `β`).
pub fn cg_region(data: &Sample, beta: f64, alt: Alternative, draws: usize, seed: u64) -> Result<RegionFit> {
    check_beta(beta)?;
    let d = cg_draws(data, draws, seed)?;
    let (centre, scale) = (data.mean(), data.sd());
    let (lo, hi) = cuts(beta, alt, |q| cg_cut(&d, q, centre, scale))?;
    Ok(RegionFit::plain(Method::Cg, CredibleInterval::from_cuts(lo, hi, beta, alt)))
}

pub fn crawford_garthwaite(
    subject: f64,
    data: &Sample,
    beta: f64,
    alt: Alternative,
    draws: usize,
    seed: u64,
) -> Result<TestResult> {
    Ok(cg_region(data, beta, alt, draws, seed)?.decide(subject))
}

/// Rank tail test. With `r` the number of controls at least as extreme as
/// the subject on a side, that side's tail probability is
/// `(r + 0.5)/(n + 1)`; the subject is rejected when it falls below the
/// side's level (`β`, or `β/2` per side for two-sided).
pub fn ad_region(data: &Sample, beta: f64, alt: Alternative) -> Result<RegionFit> {
    check_beta(beta)?;
    let n = data.len();
    if n < AD_MIN_N {
        return Err(domain(format!("the rank tail test needs at least {AD_MIN_N} controls, got {n}")));
    }
    let sorted = data.sorted();
    // Reject a side when fewer than k controls are at least as extreme,
    // k = ⌈level·(n+1) − ½⌉; the boundary is then x₍k₎ (or x₍n+1−k₎).
    let k = |level: f64| (level * (n + 1) as f64 - 0.5 - 1e-9).ceil() as i64;
    let (a, b) = tail_levels(beta, alt);
    let lo = match k(a) {
        _ if alt == Alternative::Greater => f64::NEG_INFINITY,
        k if k < 1 => f64::NEG_INFINITY,
        k if k as usize > n => f64::INFINITY,
        k => sorted[k as usize - 1],
    };
    let hi = match k(b) {
        _ if alt == Alternative::Less => f64::INFINITY,
        k if k < 1 => f64::INFINITY,
        k if k as usize > n => f64::NEG_INFINITY,
        k => sorted[n - k as usize],
    };
    Ok(RegionFit::plain(Method::Ad, CredibleInterval::from_cuts(lo, hi, beta, alt)))
}

pub fn anderson_darling_subject(subject: f64, data: &Sample, beta: f64, alt: Alternative) -> Result<TestResult> {
    Ok(ad_region(data, beta, alt)?.decide(subject))
}

/// Applies `asinh` to the controls, builds the delegate's region there and
/// maps it back through `sinh`; decisions equal the delegate's decisions on
/// the transformed subject.
pub fn arcsinh_region(data: &Sample, delegate: impl FnOnce(&Sample) -> Result<RegionFit>) -> Result<RegionFit> {
    let transformed = data.map(f64::asinh)?;
    let mut fit = delegate(&transformed)?;
    fit.interval.lo = fit.interval.lo.sinh();
    fit.interval.hi = fit.interval.hi.sinh();
    Ok(fit)
}

pub fn arcsinh_wrap(
    subject: f64,
    data: &Sample,
    delegate: impl FnOnce(&Sample) -> Result<RegionFit>,
) -> Result<TestResult> {
    Ok(arcsinh_region(data, delegate)?.decide(subject))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Sample {
        Sample::new((0..40).map(|i| ((i * 37 % 40) as f64 / 7.0).sin() * 3.0 + 0.1 * i as f64).collect()).unwrap()
    }

    #[test]
    fn subject_at_mean_is_retained() {
        let d = data();
        let s = GaussianSummary::from_sample(&d).unwrap();
        // Two-sided levels below 1 and one-sided levels below ½ keep x̄ inside.
        for (alt, beta) in [(Alternative::TwoSided, 0.99), (Alternative::Less, 0.49), (Alternative::Greater, 0.49)] {
            assert!(!crawford_t(s.mean, &s, beta, alt).unwrap().reject);
            assert!(!z_score(s.mean, &s, beta, alt).unwrap().reject);
            assert!(!crawford_garthwaite(s.mean, &d, 0.05, alt, 2000, 1).unwrap().reject);
        }
    }

    #[test]
    fn z_critical_value() {
        let s = GaussianSummary::new(1.0, 2.0, 30).unwrap();
        assert!(z_score(1.0 + 2.0 * 1.6449, &s, 0.05, Alternative::Greater).unwrap().reject);
        assert!(!z_score(1.0 + 2.0 * 1.6448, &s, 0.05, Alternative::Greater).unwrap().reject);
        let less = z_region(&s, 0.05, Alternative::Less).unwrap().interval;
        let greater = z_region(&s, 0.05, Alternative::Greater).unwrap().interval;
        assert!(((less.lo - 1.0) + (greater.hi - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn crawford_t_uses_prediction_scale() {
        let s = GaussianSummary::new(0.0, 1.0, 10).unwrap();
        let r = crawford_t_region(&s, 0.05, Alternative::TwoSided).unwrap().interval;
        // t₀.₉₇₅(9) = 2.262157.
        assert!((r.hi - 2.262_157_16 * (1.1f64).sqrt()).abs() < 1e-6);
        assert!(GaussianSummary::new(0.0, 0.0, 10).is_err());
    }

    #[test]
    fn cg_tail_is_hit_at_the_cut() {
        let d = data();
        let draws = cg_draws(&d, 5000, 4).unwrap();
        let r = cg_region(&d, 0.05, Alternative::TwoSided, 5000, 4).unwrap().interval;
        assert!((cg_tail(&draws, r.lo) - 0.025).abs() < 1e-9);
        assert!((cg_tail(&draws, r.hi) - 0.975).abs() < 1e-9);
    }

    #[test]
    fn rank_test_boundaries() {
        let d = Sample::new((1..=50).map(f64::from).collect()).unwrap();
        // Less at 0.05: k = ⌈0.05·51 − 0.5⌉ = 3.
        let less = ad_region(&d, 0.05, Alternative::Less).unwrap().interval;
        assert_eq!(less.lo, 3.0);
        let greater = ad_region(&d, 0.05, Alternative::Greater).unwrap().interval;
        assert_eq!(greater.hi, 48.0);
        assert!(anderson_darling_subject(51.0, &d, 0.05, Alternative::Greater).unwrap().reject);
        assert!(!anderson_darling_subject(25.5, &d, 0.05, Alternative::TwoSided).unwrap().reject);
        // One-sided levels above ½ move the cut past the median.
        let wide = ad_region(&d, 0.6, Alternative::Less).unwrap().interval;
        assert_eq!(wide.lo, 31.0);
        let small = Sample::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(ad_region(&small, 0.05, Alternative::Less).is_err());
    }

    #[test]
    fn arcsinh_preserves_order_and_zero() {
        assert_eq!(0f64.asinh(), 0.0);
        assert_eq!((-2f64).asinh(), -(2f64.asinh()));
        let d = data();
        let r = arcsinh_region(&d, |t| ad_region(t, 0.1, Alternative::TwoSided)).unwrap().interval;
        let plain = ad_region(&d, 0.1, Alternative::TwoSided).unwrap().interval;
        assert!((r.lo - plain.lo).abs() < 1e-12 && (r.hi - plain.hi).abs() < 1e-12);
    }
}
