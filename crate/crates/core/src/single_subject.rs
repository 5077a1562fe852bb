//! The BIGPAST single-subject test and its point-estimate and
//! nonparametric variants.
//!
//! Every method reduces to an acceptance region for the subject: the null
//! hypothesis is rejected exactly when the subject falls outside it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{self, GaussianSummary};
use crate::error::{domain, Error, Result};
use crate::mh::{run_chain, MhConfig, PosteriorChain};
use crate::priors::{fit_map, PriorKind};
use crate::rng::{derive_seed, rng_from_seed};
use crate::skewt::{self, fit_mle, initial_guess, Sample, SkewTParams};

/// Posterior-median |α| beyond which a sign-constant chain is treated as a half-t.
pub const HALF_T_ALPHA: f64 = 1e3;

// Guards the floor/ceiling of products like 1000·0.05 against rounding.
const INDEX_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    TwoSided,
    Less,
    Greater,
}

impl Alternative {
    pub const ALL: [Alternative; 3] = [Alternative::TwoSided, Alternative::Less, Alternative::Greater];

    pub fn name(self) -> &'static str {
        match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Less => "less",
            Alternative::Greater => "greater",
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Alternative::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown alternative {s:?} (two-sided, less, greater)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mh,
    Map,
    Mle,
    Np,
    Z,
    T,
    Cg,
    CgHa,
    Ad,
}

impl Method {
    pub const ALL: [Method; 9] =
        [Method::Mh, Method::Map, Method::Mle, Method::Np, Method::Z, Method::T, Method::Cg, Method::CgHa, Method::Ad];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mh => "mh",
            Method::Map => "map",
            Method::Mle => "mle",
            Method::Np => "np",
            Method::Z => "z",
            Method::T => "t",
            Method::Cg => "cg",
            Method::CgHa => "cg-ha",
            Method::Ad => "ad",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        let s = if s == "bigpast" { "mh" } else { s.as_str() };
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
            Error::Config(format!("unknown method {s:?} (expected one of {})", names.join(", ")))
        })
    }
}

/// Which side a degenerate (half-t) posterior has collapsed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfT {
    Positive,
    Negative,
}

/// Acceptance region for the subject. One-sided regions have an infinite
/// end, serialised as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleInterval {
    #[serde(with = "lower_bound")]
    pub lo: f64,
    #[serde(with = "upper_bound")]
    pub hi: f64,
    pub beta: f64,
    pub alternative: Alternative,
}

impl CredibleInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Builds the region from the lower and upper cut points a method
    /// computes, keeping only the side(s) `alternative` tests.
    pub(crate) fn from_cuts(lo: f64, hi: f64, beta: f64, alternative: Alternative) -> Self {
        let (lo, hi) = match alternative {
            Alternative::TwoSided => (lo, hi),
            Alternative::Less => (lo, f64::INFINITY),
            Alternative::Greater => (f64::NEG_INFINITY, hi),
        };
        CredibleInterval { lo, hi, beta, alternative }
    }
}

/// Per-side tail probabilities `(lower, upper)` for a test at level `beta`.
pub(crate) fn tail_levels(beta: f64, alt: Alternative) -> (f64, f64) {
    match alt {
        Alternative::TwoSided => (0.5 * beta, 0.5 * beta),
        Alternative::Less | Alternative::Greater => (beta, beta),
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("significance level must lie in (0, 1), got {beta}")))
    }
}

mod lower_bound {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() { s.serialize_some(x) } else { s.serialize_none() }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}

mod upper_bound {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        super::lower_bound::serialize(x, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// A method's acceptance region plus sampler diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFit {
    pub method: Method,
    pub interval: CredibleInterval,
    pub chain_acceptance: Option<f64>,
    pub degenerate_half_t: bool,
}

impl RegionFit {
    pub(crate) fn plain(method: Method, interval: CredibleInterval) -> Self {
        RegionFit { method, interval, chain_acceptance: None, degenerate_half_t: false }
    }

    pub fn decide(&self, subject: f64) -> TestResult {
        TestResult {
            method: self.method,
            reject: !self.interval.contains(subject),
            interval: self.interval,
            subject,
            chain_acceptance: self.chain_acceptance,
            degenerate_half_t: self.degenerate_half_t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub reject: bool,
    pub interval: CredibleInterval,
    pub subject: f64,
    pub chain_acceptance: Option<f64>,
    pub degenerate_half_t: bool,
}

/// `s` predictive draws per posterior draw, pooled and sorted ascending.
pub fn predictive_pool(chain: &PosteriorChain, s: usize, seed: u64) -> Result<Vec<f64>> {
    if chain.is_empty() {
        return Err(domain("predictive pool needs a non-empty chain"));
    }
    if s == 0 {
        return Err(domain("predictive pool needs s >= 1"));
    }
    let mut rng = rng_from_seed(seed);
    let mut pool = Vec::with_capacity(chain.len() * s);
    for p in &chain.draws {
        for _ in 0..s {
            pool.push(skewt::draw(p, &mut rng));
        }
    }
    pool.sort_by(f64::total_cmp);
    Ok(pool)
}

// 1-based order statistic x₍k₎.
fn order_stat(sorted: &[f64], k: i64) -> Result<f64> {
    if k < 1 || k as usize > sorted.len() {
        return Err(Error::DegenerateIndex { index: k, len: sorted.len() });
    }
    Ok(sorted[k as usize - 1])
}

fn floor_index(b: usize, q: f64) -> i64 {
    (b as f64 * q + INDEX_SNAP).floor() as i64
}

fn ceil_index(b: usize, q: f64) -> i64 {
    (b as f64 * q - INDEX_SNAP).ceil() as i64
}

/// Order-statistic region from a sorted pool: two-sided
/// `[x₍⌊Bβ/2⌋₎, x₍⌈B(1−β/2)⌉₎]`, one-sided single cuts at `β`. A half-t
/// posterior replaces the two-sided region by `[x₍₁₎, x₍⌈B(1−β)⌉₎]`
/// (positive) or `[x₍⌊Bβ⌋₎, x₍B₎]` (negative).
pub fn credible_interval(
    pool: &[f64],
    beta: f64,
    alt: Alternative,
    degenerate: Option<HalfT>,
) -> Result<CredibleInterval> {
    check_beta(beta)?;
    let b = pool.len();
    let (lo, hi) = match (alt, degenerate) {
        (Alternative::TwoSided, Some(HalfT::Positive)) => {
            (order_stat(pool, 1)?, order_stat(pool, ceil_index(b, 1.0 - beta))?)
        }
        (Alternative::TwoSided, Some(HalfT::Negative)) => {
            (order_stat(pool, floor_index(b, beta))?, order_stat(pool, b as i64)?)
        }
        (Alternative::TwoSided, None) => (
            order_stat(pool, floor_index(b, 0.5 * beta))?,
            order_stat(pool, ceil_index(b, 1.0 - 0.5 * beta))?,
        ),
        (Alternative::Less, _) => (order_stat(pool, floor_index(b, beta))?, f64::INFINITY),
        (Alternative::Greater, _) => (f64::NEG_INFINITY, order_stat(pool, ceil_index(b, 1.0 - beta))?),
    };
    Ok(CredibleInterval { lo, hi, beta, alternative: alt })
}

/// Half-t detection: posterior-median |α| above [`HALF_T_ALPHA`] with every
/// α draw of one sign.
pub fn half_t_side(chain: &PosteriorChain) -> Option<HalfT> {
    if chain.is_empty() || chain.median_alpha().abs() <= HALF_T_ALPHA {
        return None;
    }
    if chain.draws.iter().all(|p| p.alpha > 0.0) {
        Some(HalfT::Positive)
    } else if chain.draws.iter().all(|p| p.alpha < 0.0) {
        Some(HalfT::Negative)
    } else {
        None
    }
}

/// BIGPAST region: sample the posterior, pool `s` predictive draws per
/// posterior draw and cut the pool. The pool uses a seed derived from
/// `cfg.seed`.
pub fn mh_region(data: &Sample, beta: f64, alt: Alternative, cfg: &MhConfig, s: usize) -> Result<RegionFit> {
    check_beta(beta)?;
    let chain = run_chain(data, initial_guess(data)?, cfg)?;
    let side = half_t_side(&chain);
    let pool = predictive_pool(&chain, s, derive_seed(cfg.seed, &[1]))?;
    Ok(RegionFit {
        method: Method::Mh,
        interval: credible_interval(&pool, beta, alt, side)?,
        chain_acceptance: Some(chain.acceptance_rate),
        degenerate_half_t: side.is_some(),
    })
}

fn quantile_region(method: Method, p: &SkewTParams, beta: f64, alt: Alternative) -> Result<RegionFit> {
    let (a, b) = tail_levels(beta, alt);
    let lo = if alt == Alternative::Greater { f64::NEG_INFINITY } else { skewt::quantile(a, p)? };
    let hi = if alt == Alternative::Less { f64::INFINITY } else { skewt::quantile(1.0 - b, p)? };
    Ok(RegionFit::plain(method, CredibleInterval::from_cuts(lo, hi, beta, alt)))
}

pub fn map_region(data: &Sample, beta: f64, alt: Alternative, kind: &PriorKind) -> Result<RegionFit> {
    check_beta(beta)?;
    let fit = fit_map(data, kind, None)?;
    quantile_region(Method::Map, &fit.params, beta, alt)
}

pub fn mle_region(data: &Sample, beta: f64, alt: Alternative) -> Result<RegionFit> {
    check_beta(beta)?;
    let fit = fit_mle(data)?;
    quantile_region(Method::Mle, &fit.params, beta, alt)
}

/// Empirical order-statistic region of the control data itself.
pub fn np_region(data: &Sample, beta: f64, alt: Alternative) -> Result<RegionFit> {
    let sorted = data.sorted();
    Ok(RegionFit::plain(Method::Np, credible_interval(&sorted, beta, alt, None)?))
}

pub fn test_mh(
    subject: f64,
    data: &Sample,
    beta: f64,
    alt: Alternative,
    cfg: &MhConfig,
    s: usize,
) -> Result<TestResult> {
    Ok(mh_region(data, beta, alt, cfg, s)?.decide(subject))
}

pub fn test_map(subject: f64, data: &Sample, beta: f64, alt: Alternative, kind: &PriorKind) -> Result<TestResult> {
    Ok(map_region(data, beta, alt, kind)?.decide(subject))
}

pub fn test_mle(subject: f64, data: &Sample, beta: f64, alt: Alternative) -> Result<TestResult> {
    Ok(mle_region(data, beta, alt)?.decide(subject))
}

pub fn test_np(subject: f64, data: &Sample, beta: f64, alt: Alternative) -> Result<TestResult> {
    Ok(np_region(data, beta, alt)?.decide(subject))
}

/// Settings shared by every method, so one configuration can drive any of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub beta: f64,
    pub alternative: Alternative,
    /// Prior for both the MH sampler and the MAP fit.
    pub prior: PriorKind,
    pub m0: usize,
    pub burn_in: f64,
    pub step: f64,
    /// Predictive draws per posterior draw.
    pub s: usize,
    pub cg_draws: usize,
    pub seed: u64,
}

impl Default for TestConfig {
    fn default() -> Self {
        let mh = MhConfig::default();
        TestConfig {
            beta: 0.05,
            alternative: Alternative::TwoSided,
            prior: mh.prior,
            m0: mh.m0,
            burn_in: mh.burn_in,
            step: mh.step,
            s: 100,
            cg_draws: baselines::CG_DEFAULT_DRAWS,
            seed: 0,
        }
    }
}

impl TestConfig {
    /// Sampler settings; the chain seed is derived from `seed`.
    pub fn mh_config(&self) -> MhConfig {
        MhConfig {
            m0: self.m0,
            burn_in: self.burn_in,
            step: self.step,
            seed: derive_seed(self.seed, &[0]),
            prior: self.prior,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        if self.s == 0 || self.cg_draws == 0 {
            return Err(Error::Config("s and cg_draws must be positive".into()));
        }
        self.mh_config().validate()
    }
}

/// Acceptance region of `method` for the control `data`.
pub fn region(method: Method, data: &Sample, cfg: &TestConfig) -> Result<RegionFit> {
    cfg.validate()?;
    let (beta, alt) = (cfg.beta, cfg.alternative);
    let cg_seed = derive_seed(cfg.seed, &[2]);
    match method {
        Method::Mh => mh_region(data, beta, alt, &cfg.mh_config(), cfg.s),
        Method::Map => map_region(data, beta, alt, &cfg.prior),
        Method::Mle => mle_region(data, beta, alt),
        Method::Np => np_region(data, beta, alt),
        Method::Z => baselines::z_region(&GaussianSummary::from_sample(data)?, beta, alt),
        Method::T => baselines::crawford_t_region(&GaussianSummary::from_sample(data)?, beta, alt),
        Method::Cg => baselines::cg_region(data, beta, alt, cfg.cg_draws, cg_seed),
        Method::CgHa => baselines::arcsinh_region(data, |d| baselines::cg_region(d, beta, alt, cfg.cg_draws, cg_seed))
            .map(|r| RegionFit { method: Method::CgHa, ..r }),
        Method::Ad => baselines::ad_region(data, beta, alt),
    }
}

/// Runs one method on one subject.
pub fn run_test(method: Method, subject: f64, data: &Sample, cfg: &TestConfig) -> Result<TestResult> {
    if !subject.is_finite() {
        return Err(domain(format!("subject must be finite, got {subject}")));
    }
    Ok(region(method, data, cfg)?.decide(subject))
}
