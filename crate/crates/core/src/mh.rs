//! Random-walk Metropolis–Hastings over `(α, ν, ξ, ω)`.
//!
//! `α` and `ξ` take symmetric normal steps; `ν` and `ω` take steps from a
//! normal truncated to `(0, ∞)`, whose asymmetry enters the acceptance ratio
//! as a Hastings correction.

use rand::Rng as _;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::priors::{log_posterior, PriorKind};
use crate::rng::rng_from_seed;
use crate::skewt::{Sample, SkewTParams};
use crate::special::{ln_normal_cdf, normal_cdf, normal_quantile};

/// Acceptance rates outside this band are flagged as suspicious.
pub const ACCEPTANCE_BAND: (f64, f64) = (0.05, 0.8);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhConfig {
    /// Total iterations `m₀`, burn-in included.
    pub m0: usize,
    /// Fraction of iterations discarded as burn-in.
    pub burn_in: f64,
    /// Proposal scale `δ`, shared by all four parameters.
    pub step: f64,
    pub seed: u64,
    pub prior: PriorKind,
}

impl Default for MhConfig {
    fn default() -> Self {
        MhConfig { m0: 10_000, burn_in: 0.4, step: 0.5, seed: 0, prior: PriorKind::default() }
    }
}

impl MhConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m0 == 0 {
            return Err(Error::Config("m0 must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return Err(Error::Config(format!("burn_in must lie in [0, 1), got {}", self.burn_in)));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!("step must be positive, got {}", self.step)));
        }
        self.prior.validate()
    }

    /// Index of the first retained iteration, `⌊m₀·b⌋`.
    pub fn burn_in_len(&self) -> usize {
        (self.m0 as f64 * self.burn_in).floor() as usize
    }

    /// Number of retained draws, `m₀ − ⌊m₀·b⌋`.
    pub fn kept(&self) -> usize {
        self.m0 - self.burn_in_len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorChain {
    /// Post-burn-in states, one per iteration (rejections repeat the state).
    pub draws: Vec<SkewTParams>,
    /// Accepted proposals over all `m₀` iterations.
    pub acceptance_rate: f64,
    pub all_rejected: bool,
}

impl PosteriorChain {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn in_acceptance_band(&self) -> bool {
        (ACCEPTANCE_BAND.0..=ACCEPTANCE_BAND.1).contains(&self.acceptance_rate)
    }

    pub fn component(&self, f: impl Fn(&SkewTParams) -> f64) -> Vec<f64> {
        self.draws.iter().map(f).collect()
    }

    /// Component-wise posterior mean.
    pub fn mean(&self) -> SkewTParams {
        let m = self.draws.len() as f64;
        let mut acc = SkewTParams { alpha: 0.0, nu: 0.0, xi: 0.0, omega: 0.0 };
        for d in &self.draws {
            acc.alpha += d.alpha;
            acc.nu += d.nu;
            acc.xi += d.xi;
            acc.omega += d.omega;
        }
        SkewTParams { alpha: acc.alpha / m, nu: acc.nu / m, xi: acc.xi / m, omega: acc.omega / m }
    }

    pub fn median_alpha(&self) -> f64 {
        let mut a = self.component(|p| p.alpha);
        a.sort_by(f64::total_cmp);
        crate::skewt::quantile_sorted(&a, 0.5)
    }
}

/// Which coordinates the sampler moves. Fixed coordinates keep their
/// initial value; their random numbers are still drawn so the stream layout
/// does not depend on the mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeParams {
    pub alpha: bool,
    pub nu: bool,
    pub xi: bool,
    pub omega: bool,
}

impl FreeParams {
    pub const ALL: FreeParams = FreeParams { alpha: true, nu: true, xi: true, omega: true };
}

/// One truncated-normal step on `(0, ∞)`:
/// `new = old + δ Φ⁻¹(Φ(−old/δ) + u Φ(old/δ))`, with the Hastings term
/// `log Φ(old/δ) − log Φ(new/δ)`.
pub fn truncated_step(old: f64, delta: f64, u: f64) -> Result<(f64, f64)> {
    if !(old > 0.0 && old.is_finite()) {
        return Err(domain(format!("truncated step needs a positive start, got {old}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain(format!("truncated step needs a positive scale, got {delta}")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(domain(format!("truncated step needs u in (0, 1), got {u}")));
    }
    let a = old / delta;
    let lower = normal_cdf(-a);
    let p = lower + u * (1.0 - lower);
    // Above ½ work with the complement (1-u)Φ(a), which never rounds to 0.
    let z = if p < 0.5 { normal_quantile(p)? } else { -normal_quantile((1.0 - u) * normal_cdf(a))? };
    // Exact arithmetic keeps z > -a; rounding can touch zero when u ~ 1e-16.
    let new = (old + delta * z).max(f64::MIN_POSITIVE);
    Ok((new, ln_normal_cdf(a) - ln_normal_cdf(new / delta)))
}

/// Runs the sampler on the skewed-t posterior of `data` under `cfg.prior`.
pub fn run_chain(data: &Sample, init: SkewTParams, cfg: &MhConfig) -> Result<PosteriorChain> {
    let values = data.values();
    let prior = cfg.prior;
    run_chain_with(|p| log_posterior(values, p, &prior), init, cfg, FreeParams::ALL)
}

/// Runs the sampler on an arbitrary log target. Target errors at proposed
/// points count as zero density.
pub fn run_chain_with<F>(mut target: F, init: SkewTParams, cfg: &MhConfig, free: FreeParams) -> Result<PosteriorChain>
where
    F: FnMut(&SkewTParams) -> Result<f64>,
{
    cfg.validate()?;
    init.validate()?;
    let mut lp_old = target(&init)?;
    if !lp_old.is_finite() {
        return Err(domain(format!("log target is not finite at the initial point {init:?}")));
    }
    let delta = cfg.step;
    let mut rng = rng_from_seed(cfg.seed);
    let mut cur = init;
    let mut trace = Vec::with_capacity(cfg.m0);
    let mut accepted = 0usize;
    for _ in 0..cfg.m0 {
        let u_nu: f64 = rng.sample(Open01);
        let u_omega: f64 = rng.sample(Open01);
        let e_alpha: f64 = rng.sample(StandardNormal);
        let e_xi: f64 = rng.sample(StandardNormal);
        let u: f64 = rng.sample(Open01);

        let mut prop = cur;
        let mut correction = 0.0;
        if free.nu {
            let (nu, c) = truncated_step(cur.nu, delta, u_nu)?;
            prop.nu = nu;
            correction += c;
        }
        if free.omega {
            let (omega, c) = truncated_step(cur.omega, delta, u_omega)?;
            prop.omega = omega;
            correction += c;
        }
        if free.alpha {
            prop.alpha += delta * e_alpha;
        }
        if free.xi {
            prop.xi += delta * e_xi;
        }

        let lp_new = match target(&prop) {
            Ok(v) if !v.is_nan() => v,
            _ => f64::NEG_INFINITY,
        };
        let log_ratio = lp_new - lp_old + correction;
        if u.ln() <= log_ratio {
            cur = prop;
            lp_old = lp_new;
            accepted += 1;
        }
        trace.push(cur);
    }
    let draws = trace.split_off(cfg.burn_in_len());
    Ok(PosteriorChain {
        draws,
        acceptance_rate: accepted as f64 / cfg.m0 as f64,
        all_rejected: accepted == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_sf;

    #[test]
    fn midpoint_argument() {
        let (old, delta) = (0.7, 0.5);
        let a = old / delta;
        let q = normal_cdf(-a);
        // u with q + u Φ(a) = ½ + ½q, i.e. u = ½.
        let (new, _) = truncated_step(old, delta, 0.5).unwrap();
        let expect = old + delta * normal_quantile(0.5 + 0.5 * q).unwrap();
        assert!((new - expect).abs() < 1e-12);
    }

    #[test]
    fn far_from_boundary_is_symmetric() {
        for &u in &[1e-6, 0.2, 0.5, 0.9, 1.0 - 1e-9] {
            let (new, c) = truncated_step(100.0, 0.5, u).unwrap();
            assert!((new - (100.0 + 0.5 * normal_quantile(u).unwrap())).abs() < 1e-9);
            assert!(c.abs() < 1e-300);
        }
    }

    #[test]
    fn always_positive() {
        for &old in &[1e-12, 1e-3, 0.1, 5.0, 1e8] {
            for &u in &[1e-300, 1e-17, 0.5, 1.0 - 1e-16] {
                let (new, c) = truncated_step(old, 0.5, u).unwrap();
                assert!(new > 0.0 && new.is_finite() && c.is_finite(), "old={old} u={u}");
            }
        }
        assert!(truncated_step(0.0, 0.5, 0.5).is_err());
        assert!(truncated_step(1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn truncated_normal_distribution() {
        // KS against the density of N(1, 0.25) truncated to (0, ∞).
        let (old, delta) = (1.0, 0.5);
        let mut rng = rng_from_seed(3);
        let n = 100_000;
        let mut xs: Vec<f64> =
            (0..n).map(|_| truncated_step(old, delta, rng.sample(Open01)).unwrap().0).collect();
        xs.sort_by(f64::total_cmp);
        let mass = normal_sf(-old / delta);
        let cdf = |x: f64| (normal_cdf((x - old) / delta) - normal_cdf(-old / delta)) / mass;
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        // Critical value at level 0.01.
        assert!(d < 1.628 / (n as f64).sqrt(), "KS distance {d}");
    }

    #[test]
    fn flat_target_accepts_nearly_everything() {
        let cfg = MhConfig { m0: 5000, seed: 9, ..MhConfig::default() };
        let init = SkewTParams::new(0.0, 20.0, 0.0, 20.0).unwrap();
        let chain = run_chain_with(|_| Ok(0.0), init, &cfg, FreeParams::ALL).unwrap();
        assert!(chain.acceptance_rate >= 0.99, "{}", chain.acceptance_rate);
        assert_eq!(chain.len(), 3000);
        assert!(chain.draws.iter().all(|p| p.nu > 0.0 && p.omega > 0.0));
    }

    #[test]
    fn non_finite_start_is_rejected() {
        let init = SkewTParams::new(0.0, 5.0, 0.0, 1.0).unwrap();
        let r = run_chain_with(|_| Ok(f64::NEG_INFINITY), init, &MhConfig::default(), FreeParams::ALL);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn all_rejected_is_flagged() {
        let init = SkewTParams::new(0.0, 5.0, 0.0, 1.0).unwrap();
        let cfg = MhConfig { m0: 200, ..MhConfig::default() };
        let chain =
            run_chain_with(|p| Ok(if *p == init { 0.0 } else { f64::NEG_INFINITY }), init, &cfg, FreeParams::ALL)
                .unwrap();
        assert!(chain.all_rejected);
        assert_eq!(chain.acceptance_rate, 0.0);
        assert!(chain.draws.iter().all(|p| *p == init));
    }

    #[test]
    fn chain_length_is_exact() {
        for (m0, b, kept) in [(10_000, 0.4, 6000), (7, 0.5, 4), (1, 0.0, 1), (3, 0.99, 1)] {
            let cfg = MhConfig { m0, burn_in: b, ..MhConfig::default() };
            assert_eq!(cfg.kept(), kept);
            let init = SkewTParams::new(0.0, 5.0, 0.0, 1.0).unwrap();
            let chain = run_chain_with(|_| Ok(0.0), init, &cfg, FreeParams::ALL).unwrap();
            assert_eq!(chain.len(), kept);
        }
    }
}
