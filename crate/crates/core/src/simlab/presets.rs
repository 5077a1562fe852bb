//! Named experiment configurations. `scale` multiplies the published
//! replication counts: 1.0 is full scale, 0.01 turns the 10⁶-outcome
//! comparison tables into 10⁴ outcomes.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{kl_symmetric, matched_normal, tv_to_matched_normal, NegativeSource, RatioPreset, SubjectPlan};
use super::experiment::ExperimentSpec;
use crate::error::{Error, Result};
use crate::priors::{fit_map, PriorKind};
use crate::rng::{derive_seed, rng_from_seed};
use crate::single_subject::{Alternative, Method, TestConfig};
use crate::skewt::{self, Sample, SkewTParams};
use crate::special::student_t_cdf;

/// Severe-skew setting of the comparison tables.
pub const SEVERE_SKEW: (f64, f64) = (-3.23, 7.0);
pub const COMPARISON_NS: [usize; 4] = [50, 100, 200, 400];
pub const COMPARISON_METHODS: [Method; 6] = [Method::Z, Method::T, Method::CgHa, Method::Cg, Method::Ad, Method::Mh];
/// Test outcomes per full-scale comparison cell.
pub const COMPARISON_OUTCOMES: f64 = 1e6;
/// Subjects tested against each control group in comparison sweeps.
pub const SUBJECTS_PER_GROUP: usize = 100;

pub const FRAMEWORK_SETTINGS: [(f64, f64); 10] =
    [(0.0, 3.0), (1.0, 3.0), (3.0, 3.0), (5.0, 5.0), (10.0, 10.0), (20.0, 20.0), (30.0, 30.0), (50.0, 50.0), (5.0, 50.0), (50.0, 5.0)];
pub const FRAMEWORK_GROUPS: f64 = 400.0;
pub const FRAMEWORK_METHODS: [Method; 4] = [Method::Mh, Method::Map, Method::Mle, Method::Np];

pub const PRIOR_SETTINGS: [(f64, f64); 6] = [(-1.0, 1.0), (-10.0, 10.0), (-30.0, 30.0), (-50.0, 50.0), (-1.0, 50.0), (-50.0, 1.0)];
pub const PRIOR_REPLICATIONS: f64 = 1000.0;

pub const TV_SETTINGS: [(f64, f64); 4] = [(1.0, 10.0), (1.0, 5.0), (2.0, 5.0), (3.0, 5.0)];
pub const SIGMA_NU_GRID: [f64; 12] = [1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 30.0, 50.0, 100.0, 200.0, 500.0, 1000.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Table1,
    Table2,
    Table3,
    Table5,
    Table8Text,
    Table8Caption,
    TvDistances,
    SigmaNuCheck,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Table1,
        Preset::Table2,
        Preset::Table3,
        Preset::Table5,
        Preset::Table8Text,
        Preset::Table8Caption,
        Preset::TvDistances,
        Preset::SigmaNuCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Table1 => "table1",
            Preset::Table2 => "table2",
            Preset::Table3 => "table3",
            Preset::Table5 => "table5",
            Preset::Table8Text => "table8-text",
            Preset::Table8Caption => "table8-caption",
            Preset::TvDistances => "tv-distances",
            Preset::SigmaNuCheck => "sigma-nu-check",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
            Error::Config(format!("unknown preset {s:?}; available: {}", names.join(", ")))
        })
    }
}

pub fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("scale must be positive, got {scale}")))
    }
}

fn scaled(base: f64, scale: f64) -> usize {
    ((base * scale).round() as usize).max(1)
}

/// Comparison sweep at the severe-skew truth: `scale·10⁶` outcomes per
/// cell, in groups of [`SUBJECTS_PER_GROUP`] subjects per control sample.
pub fn comparison(name: &str, ratio: RatioPreset, alt: Alternative, scale: f64, seed: u64) -> Result<ExperimentSpec> {
    check_scale(scale)?;
    let (negatives, positives) = ratio.split(SUBJECTS_PER_GROUP);
    Ok(ExperimentSpec {
        name: name.to_string(),
        truth: SkewTParams::standard(SEVERE_SKEW.0, SEVERE_SKEW.1)?,
        methods: COMPARISON_METHODS.to_vec(),
        ns: COMPARISON_NS.to_vec(),
        groups: scaled(COMPARISON_OUTCOMES / SUBJECTS_PER_GROUP as f64, scale),
        subjects: SubjectPlan::Ratio { negatives, positives, source: NegativeSource::Truth },
        test: TestConfig { alternative: alt, ..TestConfig::default() },
        seed,
    })
}

/// 100:0, one-sided (less): false positive rates.
pub fn table2(scale: f64, seed: u64) -> Result<ExperimentSpec> {
    comparison("table2", RatioPreset::AllNegative, Alternative::Less, scale, seed)
}

/// 50:50, two-sided.
pub fn table3(scale: f64, seed: u64) -> Result<ExperimentSpec> {
    comparison("table3", RatioPreset::Balanced, Alternative::TwoSided, scale, seed)
}

pub fn table8(reading: RatioPreset, scale: f64, seed: u64) -> Result<ExperimentSpec> {
    let name = match reading {
        RatioPreset::Table8Caption => "table8-caption",
        _ => "table8-text",
    };
    comparison(name, reading, Alternative::TwoSided, scale, seed)
}

/// Framework comparison (MH, MAP, MLE, NP) at one `(α, ν)` with `ξ = −2`,
/// `ω = 2`: `400·scale` control groups of 100, each tested against one
/// shared set of 1000 band and 1000 tail subjects. The sampler keeps 5000
/// of 10000 iterations.
pub fn table5(alpha: f64, nu: f64, scale: f64, seed: u64) -> Result<ExperimentSpec> {
    check_scale(scale)?;
    Ok(ExperimentSpec {
        name: format!("table5 alpha={alpha} nu={nu}"),
        truth: SkewTParams::new(alpha, nu, -2.0, 2.0)?,
        methods: FRAMEWORK_METHODS.to_vec(),
        ns: vec![100],
        groups: scaled(FRAMEWORK_GROUPS, scale),
        subjects: SubjectPlan::TailUniform { k1: 1000, k2: 1000 },
        test: TestConfig { alternative: Alternative::TwoSided, burn_in: 0.5, ..TestConfig::default() },
        seed,
    })
}

pub fn table5_all(scale: f64, seed: u64) -> Result<Vec<ExperimentSpec>> {
    FRAMEWORK_SETTINGS
        .iter()
        .enumerate()
        .map(|(i, &(a, nu))| table5(a, nu, scale, derive_seed(seed, &[i as u64])))
        .collect()
}

pub fn prior_label(kind: &PriorKind) -> String {
    match kind {
        PriorKind::Jeffreys { c_nu } => format!("jeffreys(c_nu={c_nu})"),
        PriorKind::Branco => "branco".into(),
        PriorKind::Dette => "dette".into(),
        PriorKind::Uniform => "uniform".into(),
    }
}

/// Prior comparison: MAP estimates under each prior on `replications`
/// samples of size `n` per setting, scored by mean absolute deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MadSpec {
    pub settings: Vec<(f64, f64)>,
    pub xi: f64,
    pub omega: f64,
    pub n: usize,
    pub replications: usize,
    pub priors: Vec<PriorKind>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MadRow {
    pub alpha: f64,
    pub nu: f64,
    pub prior: String,
    pub mad_alpha: f64,
    pub mad_nu: f64,
    pub mad_xi: f64,
    pub mad_omega: f64,
    pub fits: usize,
    /// Fits that hit the optimizer budget; their best point is still used.
    pub not_converged: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MadReport {
    pub spec: MadSpec,
    pub rows: Vec<MadRow>,
    pub runtime_secs: f64,
}

impl MadReport {
    pub fn row(&self, alpha: f64, nu: f64, prior: &PriorKind) -> Option<&MadRow> {
        let label = prior_label(prior);
        self.rows.iter().find(|r| r.alpha == alpha && r.nu == nu && r.prior == label)
    }
}

pub fn table1(scale: f64, seed: u64) -> Result<MadSpec> {
    check_scale(scale)?;
    Ok(MadSpec {
        settings: PRIOR_SETTINGS.to_vec(),
        xi: -2.0,
        omega: 2f64.sqrt(),
        n: 500,
        replications: scaled(PRIOR_REPLICATIONS, scale),
        priors: vec![
            PriorKind::Jeffreys { c_nu: 0.0 },
            PriorKind::Jeffreys { c_nu: 1.0 },
            PriorKind::Branco,
            PriorKind::Dette,
            PriorKind::Uniform,
        ],
        seed,
    })
}

enum FitOutcome {
    Ok(SkewTParams, bool),
    Failed,
}

pub fn run_mad(spec: &MadSpec) -> Result<MadReport> {
    let start = Instant::now();
    if spec.replications == 0 || spec.n < 2 {
        return Err(Error::Config("replications and n must be positive".into()));
    }
    for p in &spec.priors {
        p.validate()?;
    }
    let units: Vec<(usize, usize)> =
        (0..spec.settings.len()).flat_map(|s| (0..spec.replications).map(move |r| (s, r))).collect();
    let fits: Vec<Result<Vec<FitOutcome>>> = units
        .par_iter()
        .map(|&(si, rep)| {
            let (alpha, nu) = spec.settings[si];
            let truth = SkewTParams::new(alpha, nu, spec.xi, spec.omega)?;
            let mut rng = rng_from_seed(derive_seed(spec.seed, &[si as u64, rep as u64]));
            let data = Sample::new(skewt::sample_with(&truth, spec.n, &mut rng)?)?;
            Ok(spec
                .priors
                .iter()
                .map(|kind| match fit_map(&data, kind, None) {
                    Ok(f) => FitOutcome::Ok(f.params, true),
                    Err(Error::FitFailed(f)) => FitOutcome::Ok(f.params, false),
                    Err(_) => FitOutcome::Failed,
                })
                .collect())
        })
        .collect();

    let mut rows = Vec::new();
    for (si, &(alpha, nu)) in spec.settings.iter().enumerate() {
        for (pi, kind) in spec.priors.iter().enumerate() {
            let mut sums = [0.0; 4];
            let (mut count, mut not_converged, mut failed) = (0, 0, 0);
            for rep in 0..spec.replications {
                match &fits[si * spec.replications + rep] {
                    Ok(v) => match v[pi] {
                        FitOutcome::Ok(p, converged) => {
                            sums[0] += (p.alpha - alpha).abs();
                            sums[1] += (p.nu - nu).abs();
                            sums[2] += (p.xi - spec.xi).abs();
                            sums[3] += (p.omega - spec.omega).abs();
                            count += 1;
                            not_converged += !converged as usize;
                        }
                        FitOutcome::Failed => failed += 1,
                    },
                    Err(_) => failed += 1,
                }
            }
            let c = count.max(1) as f64;
            rows.push(MadRow {
                alpha,
                nu,
                prior: prior_label(kind),
                mad_alpha: sums[0] / c,
                mad_nu: sums[1] / c,
                mad_xi: sums[2] / c,
                mad_omega: sums[3] / c,
                fits: count,
                not_converged,
                failed,
            });
        }
    }
    Ok(MadReport { spec: spec.clone(), rows, runtime_secs: start.elapsed().as_secs_f64() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvRow {
    pub alpha: f64,
    pub nu: f64,
    pub mu: f64,
    pub sigma2: f64,
    pub tv: f64,
    pub kl: f64,
}

/// Distances between the standard skewed t and its moment-matched normal.
pub fn tv_distances() -> Result<Vec<TvRow>> {
    TV_SETTINGS
        .iter()
        .map(|&(alpha, nu)| {
            let p = SkewTParams::standard(alpha, nu)?;
            let (mu, sigma2) = matched_normal(&p)?;
            let sd = sigma2.sqrt();
            let ln_norm = -0.5 * (2.0 * std::f64::consts::PI * sigma2).ln();
            let kl = kl_symmetric(|x| skewt::log_pdf(x, &p), |x| ln_norm - 0.5 * ((x - mu) / sd).powi(2))?;
            Ok(TvRow { alpha, nu, mu, sigma2, tv: tv_to_matched_normal(&p)?, kl })
        })
        .collect()
}

/// Student t (ν = 5) mass between the normal-theory and skewed-t critical
/// values at β = 0.05 for the skewed t (α = −2, ν = 5).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Misspecification {
    pub t_cut: f64,
    pub skew_less_cut: f64,
    pub skew_greater_cut: f64,
    /// `Pr_t(q₀.₀₅ ≤ x ≤ t₀.₀₅)`.
    pub less_mass: f64,
    /// `Pr_t(q₀.₉₅ ≤ x ≤ t₀.₉₅)`.
    pub greater_mass: f64,
}

pub fn misspecification() -> Result<Misspecification> {
    let nu = 5.0;
    let p = SkewTParams::standard(-2.0, nu)?;
    let t_cut = crate::special::student_t_quantile(0.95, nu)?;
    let lo = skewt::quantile(0.05, &p)?;
    let hi = skewt::quantile(0.95, &p)?;
    Ok(Misspecification {
        t_cut,
        skew_less_cut: lo,
        skew_greater_cut: hi,
        less_mass: student_t_cdf(-t_cut, nu)? - student_t_cdf(lo, nu)?,
        greater_mass: student_t_cdf(t_cut, nu)? - student_t_cdf(hi, nu)?,
    })
}
