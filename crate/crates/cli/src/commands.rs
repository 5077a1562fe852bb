use std::io::Write;
use std::path::PathBuf;

use bigpast::gof::{gof_skewt, GofResult, MIN_N};
use bigpast::priors::{fit_map, log_prior, sigma_nu, FisherBlock, PriorKind};
use bigpast::simlab::presets::{self, Preset};
use bigpast::simlab::{run_experiment, sigma_nu_validation, ExperimentReport, RatioPreset};
use bigpast::skewt::{fit_mle, FitResult};
use bigpast::{Alternative, Method, Sample, SkewTParams, TestConfig, TestResult};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::input::{read_column, read_single};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorName {
    Jeffreys,
    Branco,
    Dette,
    Uniform,
}

#[derive(Debug, Args)]
pub struct PriorArgs {
    /// Prior for MAP fits and the sampler.
    #[arg(long, value_enum, default_value = "jeffreys")]
    prior: PriorName,
    /// Constant c_ν of the Jeffreys prior, in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    c_nu: f64,
}

impl PriorArgs {
    fn kind(&self) -> PriorKind {
        match self.prior {
            PriorName::Jeffreys => PriorKind::Jeffreys { c_nu: self.c_nu },
            PriorName::Branco => PriorKind::Branco,
            PriorName::Dette => PriorKind::Dette,
            PriorName::Uniform => PriorKind::Uniform,
        }
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file with one numeric column (header optional).
    #[arg(long, alias = "data")]
    control: PathBuf,
    /// Column to read from a multi-column file.
    #[arg(long)]
    column: Option<String>,
}

impl DataArgs {
    fn sample(&self) -> Result<Sample, CliError> {
        Ok(Sample::new(read_column(&self.control, self.column.as_deref())?)?)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn sink(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.output {
            Some(p) => Box::new(std::fs::File::create(p).map_err(|source| CliError::Io { path: p.clone(), source })?),
            None => Box::new(std::io::stdout().lock()),
        })
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<(), CliError> {
        let mut w = self.sink()?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w).map_err(|e| CliError::Usage(e.to_string()))
    }

    fn csv<T: Serialize>(&self, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(self.sink()?);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| CliError::Usage(e.to_string()))
    }

    fn emit<T: Serialize, R: Serialize>(&self, value: &T, rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
        match self.format {
            Format::Json => self.json(value),
            Format::Csv => self.csv(rows),
        }
    }
}

#[derive(Debug, Args)]
pub struct FitCmd {
    #[command(flatten)]
    data: DataArgs,
    /// `mle` or `map`.
    #[arg(long, default_value = "map")]
    method: Method,
    #[command(flatten)]
    prior: PriorArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Serialize)]
struct FitOutput {
    method: Method,
    prior: Option<PriorKind>,
    n: usize,
    #[serde(flatten)]
    params: SkewTParams,
    /// Log likelihood (MLE) or log posterior (MAP) at the estimate.
    objective: f64,
    converged: bool,
    iterations: usize,
}

pub fn fit(cmd: &FitCmd) -> Result<i32, CliError> {
    let data = cmd.data.sample()?;
    let (prior, result) = match cmd.method {
        Method::Mle => (None, fit_mle(&data)),
        Method::Map => {
            let kind = cmd.prior.kind();
            (Some(kind), fit_map(&data, &kind, None))
        }
        m => return Err(CliError::Usage(format!("fit supports mle and map, not {m}"))),
    };
    let fit: FitResult = match result {
        Ok(f) => f,
        Err(bigpast::Error::FitFailed(f)) => {
            eprintln!("warning: optimizer did not converge; reporting the best point found");
            *f
        }
        Err(e) => return Err(e.into()),
    };
    let out = FitOutput {
        method: cmd.method,
        prior,
        n: data.len(),
        params: fit.params,
        objective: fit.objective,
        converged: fit.converged,
        iterations: fit.iterations,
    };
    cmd.out.emit(&out, [&out])?;
    Ok(0)
}

#[derive(Debug, Args)]
pub struct TestCmd {
    #[command(flatten)]
    data: DataArgs,
    /// Subject observation.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "subject_file", conflicts_with = "subject_file")]
    subject: Option<f64>,
    /// File holding the subject observation.
    #[arg(long)]
    subject_file: Option<PathBuf>,
    /// Methods to run (repeat or comma-separate): mh, map, mle, np, z, t, cg, cg-ha, ad.
    #[arg(long, value_delimiter = ',', default_value = "mh")]
    method: Vec<Method>,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    #[arg(long = "alt", default_value = "two-sided")]
    alternative: Alternative,
    #[arg(long, env = "BIGPAST_SEED", default_value_t = 0)]
    seed: u64,
    /// Sampler iterations.
    #[arg(long, default_value_t = 10_000)]
    m0: usize,
    /// Fraction of iterations discarded.
    #[arg(long, default_value_t = 0.4)]
    burn_in: f64,
    /// Proposal step δ.
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    /// Predictive draws per posterior draw.
    #[arg(long, default_value_t = 100)]
    s: usize,
    /// Posterior draws for the Crawford–Garthwaite methods.
    #[arg(long, default_value_t = bigpast::baselines::CG_DEFAULT_DRAWS)]
    cg_draws: usize,
    #[command(flatten)]
    prior: PriorArgs,
    /// Fail when the skewed-t goodness-of-fit check rejects.
    #[arg(long)]
    require_gof: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Serialize)]
struct GofSummary {
    a_star: f64,
    critical_value: f64,
    reject: bool,
}

#[derive(Serialize)]
struct TestOutput<'a> {
    seed: u64,
    n: usize,
    gof: Option<GofSummary>,
    #[serde(flatten)]
    result: Results<'a>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Results<'a> {
    One(&'a TestResult),
    Many { results: &'a [TestResult] },
}

#[derive(Serialize)]
struct TestRow {
    method: Method,
    reject: bool,
    lo: Option<f64>,
    hi: Option<f64>,
    beta: f64,
    alternative: Alternative,
    subject: f64,
    chain_acceptance: Option<f64>,
    degenerate_half_t: bool,
    seed: u64,
}

fn gof_precheck(data: &Sample, require: bool) -> Result<Option<GofSummary>, CliError> {
    if data.len() < MIN_N {
        let msg = format!("goodness-of-fit check skipped: needs at least {MIN_N} controls, got {}", data.len());
        if require {
            return Err(CliError::Usage(msg));
        }
        eprintln!("warning: {msg}");
        return Ok(None);
    }
    match gof_skewt(data, 0.05) {
        Ok(GofResult { a_star, critical_value, reject, .. }) => {
            if reject {
                let msg = format!("skewed t fit rejected by goodness of fit (A* = {a_star:.3} > {critical_value:.3})");
                if require {
                    return Err(CliError::Usage(msg));
                }
                eprintln!("warning: {msg}");
            }
            Ok(Some(GofSummary { a_star, critical_value, reject }))
        }
        Err(e) if !require => {
            eprintln!("warning: goodness-of-fit check failed: {e}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn test(cmd: &TestCmd) -> Result<i32, CliError> {
    let data = cmd.data.sample()?;
    let subject = match (&cmd.subject, &cmd.subject_file) {
        (Some(x), _) => *x,
        (None, Some(p)) => read_single(p)?,
        (None, None) => unreachable!("clap requires one of --subject/--subject-file"),
    };
    let cfg = TestConfig {
        beta: cmd.beta,
        alternative: cmd.alternative,
        prior: cmd.prior.kind(),
        m0: cmd.m0,
        burn_in: cmd.burn_in,
        step: cmd.step,
        s: cmd.s,
        cg_draws: cmd.cg_draws,
        seed: cmd.seed,
    };
    cfg.validate()?;
    let mut methods = cmd.method.clone();
    methods.dedup();
    let gof = gof_precheck(&data, cmd.require_gof)?;
    eprintln!("seed: {}", cmd.seed);
    let results = methods
        .iter()
        .map(|&m| bigpast::single_subject::run_test(m, subject, &data, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &results {
        if r.chain_acceptance.is_some_and(|a| !(bigpast::mh::ACCEPTANCE_BAND.0..=bigpast::mh::ACCEPTANCE_BAND.1).contains(&a)) {
            eprintln!("warning: {} chain acceptance rate {:.3} is outside the sanity band", r.method, r.chain_acceptance.unwrap());
        }
    }
    let output = TestOutput {
        seed: cmd.seed,
        n: data.len(),
        gof,
        result: if results.len() == 1 { Results::One(&results[0]) } else { Results::Many { results: &results } },
    };
    let rows = results.iter().map(|r| TestRow {
        method: r.method,
        reject: r.reject,
        lo: r.interval.lo.is_finite().then_some(r.interval.lo),
        hi: r.interval.hi.is_finite().then_some(r.interval.hi),
        beta: r.interval.beta,
        alternative: r.interval.alternative,
        subject: r.subject,
        chain_acceptance: r.chain_acceptance,
        degenerate_half_t: r.degenerate_half_t,
        seed: cmd.seed,
    });
    cmd.out.emit(&output, rows)?;
    Ok(match results.as_slice() {
        [only] if only.reject => 2,
        _ => 0,
    })
}

#[derive(Debug, Args)]
pub struct GofCmd {
    #[command(flatten)]
    data: DataArgs,
    /// Significance level, within [0.01, 0.10].
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    #[command(flatten)]
    out: OutputArgs,
}

pub fn gof(cmd: &GofCmd) -> Result<i32, CliError> {
    let data = cmd.data.sample()?;
    let r = gof_skewt(&data, cmd.beta)?;
    #[derive(Serialize)]
    struct Row<'a> {
        a_squared: f64,
        a_star: f64,
        critical_value: f64,
        reject: bool,
        #[serde(flatten)]
        fitted: &'a SkewTParams,
        clamped: usize,
    }
    let row = Row {
        a_squared: r.a_squared,
        a_star: r.a_star,
        critical_value: r.critical_value,
        reject: r.reject,
        fitted: &r.fitted,
        clamped: r.clamped,
    };
    cmd.out.emit(&r, [row])?;
    Ok(if r.reject { 2 } else { 0 })
}

#[derive(Debug, Args)]
pub struct PriorCmd {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long)]
    nu: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    xi: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[command(flatten)]
    prior: PriorArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Serialize)]
struct PriorOutput {
    #[serde(flatten)]
    params: SkewTParams,
    prior: String,
    log_prior: f64,
    sigma_nu_plus_1: f64,
    #[serde(flatten)]
    fisher: Option<FisherBlock>,
}

pub fn prior(cmd: &PriorCmd) -> Result<i32, CliError> {
    let params = SkewTParams::new(cmd.alpha, cmd.nu, cmd.xi, cmd.omega)?;
    let kind = cmd.prior.kind();
    let fisher = match kind {
        PriorKind::Jeffreys { c_nu } => Some(FisherBlock::compute(cmd.alpha, cmd.nu, c_nu)?),
        _ => None,
    };
    let out = PriorOutput {
        params,
        prior: presets::prior_label(&kind),
        log_prior: log_prior(&params, &kind)?,
        sigma_nu_plus_1: sigma_nu(cmd.nu + 1.0),
        fisher,
    };
    cmd.out.emit(&out, [&out])?;
    Ok(0)
}

#[derive(Debug, Args)]
pub struct SimulateCmd {
    /// table1, table2, table3, table5, table8-text, table8-caption, tv-distances, sigma-nu-check.
    #[arg(long)]
    preset: String,
    /// Replication multiplier relative to the published counts. Defaults
    /// to desk scale: 0.1 for table1 (100 fits per setting), 0.01 for the
    /// comparison tables (10⁴ outcomes per cell), 0.125 for table5 (N = 50).
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long, env = "BIGPAST_SEED", default_value_t = 0)]
    seed: u64,
    /// Restrict control sizes of the comparison tables (comma-separated).
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

fn default_scale(p: Preset) -> f64 {
    match p {
        Preset::Table1 => 0.1,
        Preset::Table5 => 0.125,
        _ => 0.01,
    }
}

fn comparison(cmd: &SimulateCmd, spec: bigpast::Result<bigpast::simlab::ExperimentSpec>) -> Result<(), CliError> {
    let mut spec = spec?;
    if !cmd.n.is_empty() {
        spec.ns = cmd.n.clone();
    }
    let report = run_experiment(&spec)?;
    eprintln!("{}: {:.1}s", spec.name, report.runtime_secs);
    cmd.out.emit(&report, report.rows())
}

pub fn simulate(cmd: &SimulateCmd) -> Result<i32, CliError> {
    let preset: Preset = cmd.preset.parse()?;
    let scale = cmd.scale.unwrap_or(default_scale(preset));
    presets::check_scale(scale)?;
    eprintln!("preset {preset}, scale {scale}, seed {}", cmd.seed);
    match preset {
        Preset::Table1 => {
            let report = presets::run_mad(&presets::table1(scale, cmd.seed)?)?;
            cmd.out.emit(&report, &report.rows)?;
        }
        Preset::Table2 => comparison(cmd, presets::table2(scale, cmd.seed))?,
        Preset::Table3 => comparison(cmd, presets::table3(scale, cmd.seed))?,
        Preset::Table8Text => comparison(cmd, presets::table8(RatioPreset::Table8Text, scale, cmd.seed))?,
        Preset::Table8Caption => comparison(cmd, presets::table8(RatioPreset::Table8Caption, scale, cmd.seed))?,
        Preset::Table5 => {
            let reports = presets::table5_all(scale, cmd.seed)?
                .iter()
                .map(|s| {
                    let r = run_experiment(s)?;
                    eprintln!("{}: {:.1}s", s.name, r.runtime_secs);
                    Ok(r)
                })
                .collect::<Result<Vec<ExperimentReport>, CliError>>()?;
            let rows: Vec<_> = reports.iter().flat_map(|r| r.rows()).collect();
            cmd.out.emit(&reports, rows)?;
        }
        Preset::TvDistances => {
            let rows = presets::tv_distances()?;
            cmd.out.emit(&rows, &rows)?;
        }
        Preset::SigmaNuCheck => {
            let report = sigma_nu_validation(&presets::SIGMA_NU_GRID)?;
            cmd.out.emit(&report, &report.rows)?;
        }
    }
    Ok(0)
}
