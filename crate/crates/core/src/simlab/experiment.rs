use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gen_ratio_with, gen_subjects_tail_uniform, ConfusionCounts, LabeledSubject, Metrics, NegativeSource, RatioRegions};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::single_subject::{region, Method, TestConfig};
use crate::skewt::{self, Sample, SkewTParams};

/// Largest tolerated fraction of failed groups per experiment.
pub const FAILURE_BUDGET: f64 = 0.01;

// Seed-path tags.
const CONTROLS: u64 = 0;
const SUBJECTS: u64 = 1;
const TESTS: u64 = 2;
const SHARED: u64 = u64::MAX;

/// How subjects are produced for each control group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SubjectPlan {
    /// Fresh subjects per group: `negatives` null subjects and `positives`
    /// drawn from the rejection region at the test's β and alternative.
    Ratio { negatives: usize, positives: usize, source: NegativeSource },
    /// One shared set of `k1` band negatives and `k2` tail positives, tested
    /// against every group.
    TailUniform { k1: usize, k2: usize },
}

/// A replication sweep. Each of `groups` replications per control size
/// draws a control sample, fits every method once and tests all of its
/// subjects, so the number of test outcomes per cell is `groups` times the
/// subjects per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub truth: SkewTParams,
    pub methods: Vec<Method>,
    pub ns: Vec<usize>,
    pub groups: usize,
    pub subjects: SubjectPlan,
    pub test: TestConfig,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.truth.validate()?;
        self.test.validate()?;
        if self.groups == 0 {
            return Err(Error::Config("groups must be positive".into()));
        }
        if self.ns.iter().any(|&n| n < 2) {
            return Err(Error::Config("control sizes must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub method: Method,
    pub n: usize,
    pub groups: usize,
    pub failed: usize,
    /// Counts pooled over all successful groups.
    pub counts: ConfusionCounts,
    pub pooled: Metrics,
    /// Per-group metrics averaged over groups where each is defined.
    pub group_mean: Metrics,
    pub mean_chain_acceptance: Option<f64>,
    /// Chains whose acceptance rate left the sanity band.
    pub chains_flagged: usize,
    pub half_t_groups: usize,
    /// First few failure messages.
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub cells: Vec<CellReport>,
    pub runtime_secs: f64,
}

/// One CSV row: a metric of one method at one control size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub experiment: String,
    pub method: Method,
    pub n: usize,
    pub metric: String,
    pub pooled: Option<f64>,
    pub group_mean: Option<f64>,
    pub groups: usize,
    pub failed: usize,
    pub tests: u64,
}

impl ExperimentReport {
    pub fn cell(&self, method: Method, n: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.method == method && c.n == n)
    }

    pub fn rows(&self) -> Vec<MetricRow> {
        let mut rows = Vec::new();
        for c in &self.cells {
            for name in Metrics::NAMES {
                rows.push(MetricRow {
                    experiment: self.spec.name.clone(),
                    method: c.method,
                    n: c.n,
                    metric: name.to_string(),
                    pooled: c.pooled.get(name),
                    group_mean: c.group_mean.get(name),
                    groups: c.groups,
                    failed: c.failed,
                    tests: c.counts.total(),
                });
            }
        }
        rows
    }
}

struct GroupOutcome {
    // Per method, in spec order.
    results: Vec<std::result::Result<MethodOutcome, String>>,
}

struct MethodOutcome {
    counts: ConfusionCounts,
    acceptance: Option<f64>,
    half_t: bool,
}

fn run_group(
    spec: &ExperimentSpec,
    n: usize,
    g: usize,
    shared: Option<&[LabeledSubject]>,
    regions: Option<&RatioRegions>,
) -> std::result::Result<GroupOutcome, String> {
    let path = |tag| derive_seed(spec.seed, &[n as u64, g as u64, tag]);
    let mut rng = rng_from_seed(path(CONTROLS));
    let data = Sample::new(skewt::sample_with(&spec.truth, n, &mut rng).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let own;
    let subjects: &[LabeledSubject] = match (spec.subjects, shared) {
        (_, Some(s)) => s,
        (SubjectPlan::Ratio { negatives, positives, source }, None) => {
            let regions = regions.expect("ratio plans precompute their regions");
            own = gen_ratio_with(&spec.truth, negatives, positives, source, regions, &mut rng_from_seed(path(SUBJECTS)));
            &own
        }
        (SubjectPlan::TailUniform { .. }, None) => unreachable!("tail-uniform subjects are shared"),
    };
    let cfg = TestConfig { seed: path(TESTS), ..spec.test };
    let results = spec
        .methods
        .iter()
        .map(|&m| {
            let fit = region(m, &data, &cfg).map_err(|e| format!("{m} n={n} group {g}: {e}"))?;
            let mut counts = ConfusionCounts::default();
            for s in subjects {
                counts.record(s.positive, !fit.interval.contains(s.value));
            }
            Ok(MethodOutcome { counts, acceptance: fit.chain_acceptance, half_t: fit.degenerate_half_t })
        })
        .collect();
    Ok(GroupOutcome { results })
}

/// Runs `spec` in parallel over (control size, group) units and aggregates
/// in a fixed order, so the report depends only on the spec and its seed.
/// Failed groups are dropped from the counts; more than
/// [`FAILURE_BUDGET`] of them is an error.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let start = Instant::now();
    spec.validate()?;
    if spec.methods.is_empty() {
        return Ok(ExperimentReport { spec: spec.clone(), cells: Vec::new(), runtime_secs: 0.0 });
    }
    let shared = match spec.subjects {
        SubjectPlan::TailUniform { k1, k2 } => {
            Some(gen_subjects_tail_uniform(&spec.truth, k1, k2, &mut rng_from_seed(derive_seed(spec.seed, &[SHARED])))?)
        }
        SubjectPlan::Ratio { .. } => None,
    };
    let regions = match spec.subjects {
        SubjectPlan::Ratio { .. } => Some(RatioRegions::new(&spec.truth, spec.test.beta, spec.test.alternative)?),
        SubjectPlan::TailUniform { .. } => None,
    };
    let units: Vec<(usize, usize)> =
        spec.ns.iter().flat_map(|&n| (0..spec.groups).map(move |g| (n, g))).collect();
    let outcomes: Vec<_> = units
        .par_iter()
        .map(|&(n, g)| run_group(spec, n, g, shared.as_deref(), regions.as_ref()))
        .collect();

    let mut cells = Vec::new();
    let (mut failed_total, mut total) = (0, 0);
    for (ni, &n) in spec.ns.iter().enumerate() {
        let group_slice = &outcomes[ni * spec.groups..(ni + 1) * spec.groups];
        for (mi, &method) in spec.methods.iter().enumerate() {
            let mut cell = CellReport {
                method,
                n,
                groups: spec.groups,
                failed: 0,
                counts: ConfusionCounts::default(),
                pooled: Metrics::default(),
                group_mean: Metrics::default(),
                mean_chain_acceptance: None,
                chains_flagged: 0,
                half_t_groups: 0,
                errors: Vec::new(),
            };
            let mut per_group = Vec::new();
            let mut acceptance = Vec::new();
            for outcome in group_slice {
                let r = match outcome {
                    Ok(o) => o.results[mi].as_ref().map_err(Clone::clone),
                    Err(e) => Err(e.clone()),
                };
                match r {
                    Ok(o) => {
                        cell.counts.merge(&o.counts);
                        per_group.push(o.counts.metrics());
                        if let Some(a) = o.acceptance {
                            acceptance.push(a);
                            if !(crate::mh::ACCEPTANCE_BAND.0..=crate::mh::ACCEPTANCE_BAND.1).contains(&a) {
                                cell.chains_flagged += 1;
                            }
                        }
                        cell.half_t_groups += o.half_t as usize;
                    }
                    Err(e) => {
                        cell.failed += 1;
                        if cell.errors.len() < 5 {
                            cell.errors.push(e);
                        }
                    }
                }
            }
            cell.pooled = cell.counts.metrics();
            cell.group_mean = Metrics::mean_of(&per_group);
            cell.mean_chain_acceptance =
                (!acceptance.is_empty()).then(|| acceptance.iter().sum::<f64>() / acceptance.len() as f64);
            failed_total += cell.failed;
            total += cell.groups;
            cells.push(cell);
        }
    }
    if failed_total as f64 > FAILURE_BUDGET * total as f64 {
        return Err(Error::FailureBudget { failed: failed_total, total });
    }
    Ok(ExperimentReport { spec: spec.clone(), cells, runtime_secs: start.elapsed().as_secs_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single_subject::Alternative;

    fn spec(methods: Vec<Method>) -> ExperimentSpec {
        ExperimentSpec {
            name: "unit".into(),
            truth: SkewTParams::standard(-3.23, 7.0).unwrap(),
            methods,
            ns: vec![60, 90],
            groups: 4,
            subjects: SubjectPlan::Ratio { negatives: 20, positives: 20, source: NegativeSource::Truth },
            test: TestConfig { alternative: Alternative::TwoSided, cg_draws: 500, ..TestConfig::default() },
            seed: 17,
        }
    }

    #[test]
    fn empty_method_list() {
        let r = run_experiment(&spec(vec![])).unwrap();
        assert!(r.cells.is_empty());
    }

    #[test]
    fn closure_and_determinism() {
        let s = spec(vec![Method::Np, Method::T, Method::Ad]);
        let a = run_experiment(&s).unwrap();
        let b = run_experiment(&s).unwrap();
        assert_eq!(a.cells, b.cells);
        for c in &a.cells {
            assert_eq!(c.counts.total(), 4 * 40);
            assert_eq!(c.counts.tp + c.counts.fn_, 4 * 20);
        }
        assert_eq!(a.rows().len(), 2 * 3 * 4);
    }

    #[test]
    fn json_round_trip() {
        let r = run_experiment(&spec(vec![Method::Z])).unwrap();
        let back: ExperimentReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn failures_count_against_the_budget() {
        // NP with β=0.01 two-sided needs ⌊nβ/2⌋ ≥ 1, i.e. n ≥ 200: every group fails.
        let mut s = spec(vec![Method::Np]);
        s.test.beta = 0.01;
        assert!(matches!(run_experiment(&s), Err(Error::FailureBudget { failed: 8, total: 8 })));
    }
}
