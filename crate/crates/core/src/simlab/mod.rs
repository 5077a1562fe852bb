//! Simulation laboratory: subject generators, confusion counts, distances
//! between densities, and the seeded, parallel experiment runner behind the
//! published tables.

mod distance;
mod experiment;
pub mod presets;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rng::Rng;
use crate::single_subject::{tail_levels, Alternative};
use crate::skewt::{self, SkewTParams};

pub use distance::{
    kl_symmetric, matched_normal, sigma_nu_validation, tv_distance, tv_to_matched_normal, SigmaNuReport, SigmaNuRow,
};
pub use experiment::{
    run_experiment, CellReport, ExperimentReport, ExperimentSpec, MetricRow, SubjectPlan, FAILURE_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledSubject {
    pub value: f64,
    /// Ground truth: drawn from outside the null's acceptance region.
    pub positive: bool,
}

/// Where negative (null) subjects come from in ratio designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeSource {
    /// Plain draws from the control distribution.
    Truth,
    /// Draws from the band just inside the cut points: probability in
    /// `(β/2, β]` or `[1−β, 1−β/2)` per tested side.
    Band,
}

/// Mixing presets for `c:d` = controls : different-distribution subjects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioPreset {
    /// 100:0 — null subjects only.
    AllNegative,
    /// 50:50.
    Balanced,
    /// Main-text reading of the appendix table: c:d = 20:80, i.e. 20% negative.
    Table8Text,
    /// Caption reading of the same table: 20% positive, 80% negative.
    Table8Caption,
}

impl RatioPreset {
    /// `(negatives, positives)` out of `total`, rounding the negative share.
    pub fn split(self, total: usize) -> (usize, usize) {
        let neg_share = match self {
            RatioPreset::AllNegative => 1.0,
            RatioPreset::Balanced => 0.5,
            RatioPreset::Table8Text => 0.2,
            RatioPreset::Table8Caption => 0.8,
        };
        let neg = (total as f64 * neg_share).round() as usize;
        (neg, total - neg)
    }
}

/// Probability cut points of a region, as values of the truth's quantile
/// function: lower tail `(−∞, lo]` and upper tail `[hi, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cuts {
    pub lo: f64,
    pub hi: f64,
}

// Draws from `truth` conditioned on `accept`, which is equivalent to
// sampling uniformly in CDF probability over the accepted set.
fn draw_conditioned(truth: &SkewTParams, rng: &mut Rng, accept: impl Fn(f64) -> bool) -> f64 {
    loop {
        let x = skewt::draw(truth, rng);
        if accept(x) {
            return x;
        }
    }
}

/// Quantile cut points of the rejection region at `beta` under `alt`.
pub(crate) fn rejection_cuts(truth: &SkewTParams, beta: f64, alt: Alternative) -> Result<Cuts> {
    let (a, b) = tail_levels(beta, alt);
    let lo = if alt == Alternative::Greater { f64::NEG_INFINITY } else { skewt::quantile(a, truth)? };
    let hi = if alt == Alternative::Less { f64::INFINITY } else { skewt::quantile(1.0 - b, truth)? };
    Ok(Cuts { lo, hi })
}

/// Precomputed quantiles for the ratio generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RatioRegions {
    reject: Cuts,
    band: Cuts,
}

impl RatioRegions {
    pub fn new(truth: &SkewTParams, beta: f64, alt: Alternative) -> Result<Self> {
        if !(beta > 0.0 && beta < 0.5) {
            return Err(domain(format!("subject generation needs beta in (0, 0.5), got {beta}")));
        }
        Ok(RatioRegions { reject: rejection_cuts(truth, beta, alt)?, band: rejection_cuts(truth, 2.0 * beta, alt)? })
    }
}

/// `c` negatives then `d` positives. Positives come from the rejection
/// region of `truth` at `beta` (each tested side weighted by its mass);
/// negatives from the truth or the band just inside the cut points.
pub fn gen_subjects_ratio(
    truth: &SkewTParams,
    c: usize,
    d: usize,
    beta: f64,
    alt: Alternative,
    negatives: NegativeSource,
    rng: &mut Rng,
) -> Result<Vec<LabeledSubject>> {
    truth.validate()?;
    let regions = RatioRegions::new(truth, beta, alt)?;
    Ok(gen_ratio_with(truth, c, d, negatives, &regions, rng))
}

pub(crate) fn gen_ratio_with(
    truth: &SkewTParams,
    c: usize,
    d: usize,
    negatives: NegativeSource,
    regions: &RatioRegions,
    rng: &mut Rng,
) -> Vec<LabeledSubject> {
    let (r, band) = (regions.reject, regions.band);
    let mut out = Vec::with_capacity(c + d);
    for _ in 0..c {
        let value = match negatives {
            NegativeSource::Truth => skewt::draw(truth, rng),
            NegativeSource::Band => {
                draw_conditioned(truth, rng, |x| (x > r.lo && x <= band.lo) || (x >= band.hi && x < r.hi))
            }
        };
        out.push(LabeledSubject { value, positive: false });
    }
    for _ in 0..d {
        let value = draw_conditioned(truth, rng, |x| x <= r.lo || x >= r.hi);
        out.push(LabeledSubject { value, positive: true });
    }
    out
}

/// `k1` negatives uniform (in probability) on
/// `S₂ = (q₂.₅%, q₅%] ∪ [q₉₅%, q₉₇.₅%)`, then `k2` positives uniform on
/// `S₁ = (−∞, q₂.₅%] ∪ [q₉₇.₅%, ∞)`.
pub fn gen_subjects_tail_uniform(
    truth: &SkewTParams,
    k1: usize,
    k2: usize,
    rng: &mut Rng,
) -> Result<Vec<LabeledSubject>> {
    truth.validate()?;
    let outer = rejection_cuts(truth, 0.05, Alternative::TwoSided)?;
    let inner = rejection_cuts(truth, 0.10, Alternative::TwoSided)?;
    let mut out = Vec::with_capacity(k1 + k2);
    for _ in 0..k1 {
        let value = draw_conditioned(truth, rng, |x| (x > outer.lo && x <= inner.lo) || (x >= inner.hi && x < outer.hi));
        out.push(LabeledSubject { value, positive: false });
    }
    for _ in 0..k2 {
        let value = draw_conditioned(truth, rng, |x| x <= outer.lo || x >= outer.hi);
        out.push(LabeledSubject { value, positive: true });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn record(&mut self, positive: bool, reject: bool) {
        match (positive, reject) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fn_ += 1,
        }
    }

    pub fn merge(&mut self, other: &ConfusionCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    fn ratio(num: u64, den: u64) -> Option<f64> {
        (den > 0).then(|| num as f64 / den as f64)
    }

    /// `fp/(fp+tn)`; undefined without negatives.
    pub fn fpr(&self) -> Option<f64> {
        Self::ratio(self.fp, self.fp + self.tn)
    }

    /// `tp/(tp+fn)`; undefined without positives.
    pub fn tpr(&self) -> Option<f64> {
        Self::ratio(self.tp, self.tp + self.fn_)
    }

    pub fn acc(&self) -> Option<f64> {
        Self::ratio(self.tp + self.tn, self.total())
    }

    /// `fp/(tp+fp)`; undefined when nothing is rejected.
    pub fn fdr(&self) -> Option<f64> {
        Self::ratio(self.fp, self.tp + self.fp)
    }

    pub fn metrics(&self) -> Metrics {
        Metrics { fpr: self.fpr(), tpr: self.tpr(), acc: self.acc(), fdr: self.fdr() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub fpr: Option<f64>,
    pub tpr: Option<f64>,
    pub acc: Option<f64>,
    pub fdr: Option<f64>,
}

impl Metrics {
    pub const NAMES: [&'static str; 4] = ["fpr", "tpr", "acc", "fdr"];

    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "fpr" => self.fpr,
            "tpr" => self.tpr,
            "acc" => self.acc,
            "fdr" => self.fdr,
            _ => None,
        }
    }

    /// Mean of each metric over the entries where it is defined.
    pub fn mean_of(all: &[Metrics]) -> Metrics {
        let avg = |f: &dyn Fn(&Metrics) -> Option<f64>| {
            let v: Vec<f64> = all.iter().filter_map(f).collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        };
        Metrics { fpr: avg(&|m| m.fpr), tpr: avg(&|m| m.tpr), acc: avg(&|m| m.acc), fdr: avg(&|m| m.fdr) }
    }
}
