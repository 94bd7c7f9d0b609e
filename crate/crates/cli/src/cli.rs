//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use sparsepoly_core::blackbox::{make_poly_oracle, make_table_oracle};
use sparsepoly_core::gf2poly::{distance, distance_to_sparse_class, format_poly, parse_poly, parse_table, zero_fraction};
use sparsepoly_core::learner::{learn_poly_prime, InterpolationCore, MqFailure};
use sparsepoly_core::partition::{derive_params, ParamOverrides};
use sparsepoly_core::seed::{phase, stream};
use sparsepoly_core::tester::TesterConfig;
use sparsepoly_core::variation::ExactJunta;
use sparsepoly_core::{test_sparse_poly, BlackBox, EnumerationLimits, LearnerOutcome, Profile, SparsePoly, TesterParams, TruthTable};

use crate::audit::run_audit;
use crate::experiment::{
    run_completeness_experiment, run_query_scaling, run_soundness_experiment, write_csv, ExperimentReport, RunOptions,
};
use crate::families::{Family, FamilyKind};
use crate::verify::{run_suite, Suite};

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "sparsepoly", version, about = "Test, learn and audit sparse GF(2) polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the tester once on a polynomial or truth table file.
    Test(TestArgs),
    /// Learn a file-backed function directly with exact membership queries.
    Learn(LearnArgs),
    /// Batch runs over a family of functions.
    Experiment(ExperimentArgs),
    /// Exact verification suites.
    Verify(VerifyArgs),
    /// Exact distances between functions.
    Distance(DistanceArgs),
    /// Structural audit of a polynomial over random partitions.
    Audit(AuditArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct InputArgs {
    #[arg(long, value_name = "FILE")]
    poly: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value = "desk")]
    profile: Profile,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "bigM")]
    big_m: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    /// Read every parameter from a key=value file (`TesterParams::to_config` format).
    #[arg(long, value_name = "FILE", conflicts_with_all = ["tau", "delta", "r", "alpha", "big_m", "m"])]
    config: Option<PathBuf>,
}

impl ParamArgs {
    fn params(&self) -> anyhow::Result<TesterParams> {
        if let Some(path) = &self.config {
            let text = read(path)?;
            return Ok(TesterParams::from_config(&text)?);
        }
        let overrides = ParamOverrides {
            tau: self.tau,
            delta: self.delta,
            r: self.r,
            alpha: self.alpha,
            big_m: self.big_m,
            m: self.m,
            ..Default::default()
        };
        Ok(derive_params(self.s, self.eps, self.profile, &overrides)?)
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "OUT")]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use exact variations (input must have at most 20 relevant variables).
    #[arg(long)]
    exact_backend: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct LearnArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExperimentName {
    Completeness,
    Soundness,
    QueryScaling,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(value_enum)]
    name: ExperimentName,
    /// canonical, random-sparse, far-table, flip-noise or zero.
    #[arg(long)]
    family: Option<FamilyKind>,
    /// Number of variables; a comma-separated list for query-scaling.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Sparsity used by the family generator (defaults to --s).
    #[arg(long)]
    family_s: Option<usize>,
    /// Certification threshold for far families (defaults to --eps).
    #[arg(long)]
    far_eps: Option<f64>,
    /// Flip density of the flip-noise family, as a fraction like 3/10.
    #[arg(long, default_value = "3/10")]
    flip: String,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    exact_backend: bool,
    /// Leave per-trial digests out of the printed report.
    #[arg(long)]
    summary: bool,
    /// Write one CSV row per trial to this file.
    #[arg(long, value_name = "OUT")]
    csv: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// detection, subadditivity, structure, kl, mobius or all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct DistanceArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Second function (polynomial file) to measure against.
    #[arg(long, value_name = "FILE")]
    other_poly: Option<PathBuf>,
    /// Second function (truth-table file) to measure against.
    #[arg(long, value_name = "FILE", conflicts_with = "other_poly")]
    other_table: Option<PathBuf>,
    /// Also compute the distance to the class of polynomials with at most
    /// this many monomials.
    #[arg(long)]
    class_s: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[arg(long, value_name = "FILE")]
    poly: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

enum Input {
    Poly(SparsePoly),
    Table(TruthTable),
}

impl Input {
    fn load(args: &InputArgs) -> anyhow::Result<Self> {
        match (&args.poly, &args.table) {
            (Some(p), None) => Ok(Input::Poly(parse_poly(&read(p)?).with_context(|| p.display().to_string())?)),
            (None, Some(t)) => Ok(Input::Table(parse_table(&read(t)?).with_context(|| t.display().to_string())?)),
            _ => bail!("exactly one of --poly and --table is required"),
        }
    }

    fn oracle(&self) -> Box<dyn BlackBox> {
        match self {
            Input::Poly(p) => Box::new(make_poly_oracle(p.clone())),
            Input::Table(t) => Box::new(make_table_oracle(t.clone())),
        }
    }

    fn table(&self, limits: &EnumerationLimits) -> anyhow::Result<TruthTable> {
        Ok(match self {
            Input::Poly(p) => p.truth_table(limits)?,
            Input::Table(t) => t.clone(),
        })
    }
}

fn emit<T: Serialize>(value: &T, output: &OutputArgs) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    // a closed pipe (e.g. `| head`) is not an error
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
        _ => {}
    }
    if let Some(path) = &output.json {
        fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn test(args: TestArgs) -> anyhow::Result<i32> {
    let input = Input::load(&args.input)?;
    let params = args.params.params()?;
    let limits = EnumerationLimits::default();
    let config = if args.exact_backend {
        let junta = match &input {
            Input::Poly(p) => ExactJunta::new(p, &limits)?,
            Input::Table(t) => ExactJunta::from_table(t.clone()),
        };
        TesterConfig::exact(junta)
    } else {
        TesterConfig::default()
    };
    let verdict = test_sparse_poly(&input.oracle(), &params, &config, args.seed)?;
    emit(&verdict, &args.output)?;
    Ok(if verdict.accepted() { EXIT_ACCEPT } else { EXIT_REJECT })
}

#[derive(Serialize)]
struct LearnReport {
    outcome: LearnerOutcome,
    hypothesis: Option<String>,
    budget: sparsepoly_core::LearnerBudget,
    eq_rounds_used: u64,
    mq_issued: u64,
    seed: u64,
}

fn learn(args: LearnArgs) -> anyhow::Result<i32> {
    let input = Input::load(&args.input)?;
    let table = input.table(&EnumerationLimits::default())?;
    let mut mq = (table.n(), |z: u64| -> Result<bool, MqFailure> { Ok(table.get(z)) });
    let mut rng = stream(args.seed, &[phase::LEARNER]);
    let report = learn_poly_prime(
        &mut InterpolationCore::default(),
        &mut mq,
        args.s,
        args.eps / 4.0,
        sparsepoly_core::partition::LEARNER_CONFIDENCE,
        &mut rng,
    )?;
    let hypothesis = match &report.outcome {
        LearnerOutcome::Hypothesis { poly } => Some(format_poly(poly)),
        _ => None,
    };
    let code = if hypothesis.is_some() { EXIT_ACCEPT } else { EXIT_REJECT };
    emit(
        &LearnReport {
            outcome: report.outcome,
            hypothesis,
            budget: report.budget,
            eq_rounds_used: report.eq_rounds_used,
            mq_issued: report.mq_issued,
            seed: args.seed,
        },
        &args.output,
    )?;
    Ok(code)
}

fn experiment(args: ExperimentArgs) -> anyhow::Result<i32> {
    let params = args.params.params()?;
    let options = RunOptions { exact_backend: args.exact_backend, limits: EnumerationLimits::default() };
    let flip: Ratio<u64> = args.flip.parse().map_err(|_| anyhow::anyhow!("--flip expects a fraction like 3/10"))?;
    let family_s = args.family_s.unwrap_or(params.s);
    let far_eps = args.far_eps.unwrap_or(params.epsilon);
    let one_n = |default: usize| -> anyhow::Result<usize> {
        match args.n.as_slice() {
            [] => Ok(default),
            [n] => Ok(*n),
            _ => bail!("--n takes a single value for this experiment"),
        }
    };
    let csv = |reports: &[ExperimentReport]| -> anyhow::Result<()> {
        for r in reports.iter().filter(|r| r.excluded > 0) {
            eprintln!("note: {} draws at n = {} failed far-ness certification and were excluded", r.excluded, r.family.n);
        }
        if let Some(path) = &args.csv {
            let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
            write_csv(reports, file)?;
        }
        Ok(())
    };
    let strip = |mut r: ExperimentReport| {
        if args.summary {
            r.verdicts.clear();
        }
        r
    };
    match args.name {
        ExperimentName::Completeness => {
            let kind = args.family.unwrap_or(FamilyKind::Canonical);
            let family = Family::new(kind, one_n(64)?, family_s);
            let r = run_completeness_experiment(&family, &params, args.trials, args.seed, &options)?;
            csv(std::slice::from_ref(&r))?;
            emit(&strip(r), &args.output)?;
        }
        ExperimentName::Soundness => {
            let kind = args.family.unwrap_or(FamilyKind::FarTable);
            let n = one_n(8)?;
            let family = match kind {
                FamilyKind::FarTable => Family::far_table(n, family_s, far_eps),
                FamilyKind::FlipNoise => Family::flip_noise(n, family_s, far_eps, flip),
                other => Family::new(other, n, family_s),
            };
            let r = run_soundness_experiment(&family, &params, args.trials, args.seed, &options)?;
            csv(std::slice::from_ref(&r))?;
            emit(&strip(r), &args.output)?;
        }
        ExperimentName::QueryScaling => {
            let ns = if args.n.is_empty() { vec![64, 512] } else { args.n.clone() };
            let mut r = run_query_scaling(&ns, &params, args.trials, args.seed, &options)?;
            csv(&r.reports)?;
            if args.summary {
                r.reports.clear();
            }
            emit(&r, &args.output)?;
        }
    }
    Ok(EXIT_ACCEPT)
}

fn verify(args: VerifyArgs) -> anyhow::Result<i32> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse().map_err(anyhow::Error::msg)?]
    };
    let reports = suites
        .into_iter()
        .map(|s| run_suite(s, args.trials.unwrap_or(s.default_trials()), args.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.passed());
    emit(&reports, &args.output)?;
    Ok(if passed { EXIT_ACCEPT } else { EXIT_REJECT })
}

#[derive(Serialize)]
struct DistanceReport {
    n: usize,
    zero_fraction: Option<f64>,
    other_distance: Option<f64>,
    other_distance_exact: Option<String>,
    class_s: Option<usize>,
    class_distance: Option<f64>,
    class_distance_exact: Option<String>,
    class_witness: Option<String>,
}

fn distance_cmd(args: DistanceArgs) -> anyhow::Result<i32> {
    let limits = EnumerationLimits::default();
    let input = Input::load(&args.input)?;
    let table = input.table(&limits)?;
    let other = match (&args.other_poly, &args.other_table) {
        (Some(p), _) => Some(parse_poly(&read(p)?)?.truth_table(&limits)?),
        (_, Some(t)) => Some(parse_table(&read(t)?)?),
        _ => None,
    };
    let other_d = other.map(|o| distance(&table, &o, &limits)).transpose()?;
    let class = args.class_s.map(|s| distance_to_sparse_class(&table, s, &limits)).transpose()?;
    let zf = match &input {
        Input::Poly(p) => Some(zero_fraction(p, &limits)?.to_f64()),
        Input::Table(_) => None,
    };
    emit(
        &DistanceReport {
            n: table.n(),
            zero_fraction: zf,
            other_distance: other_d.map(|d| d.to_f64()),
            other_distance_exact: other_d.map(|d| d.to_string()),
            class_s: args.class_s,
            class_distance: class.as_ref().map(|c| c.distance.to_f64()),
            class_distance_exact: class.as_ref().map(|c| c.distance.to_string()),
            class_witness: class.as_ref().map(|c| format_poly(&c.witness)),
        },
        &args.output,
    )?;
    Ok(EXIT_ACCEPT)
}

fn audit(args: AuditArgs) -> anyhow::Result<i32> {
    let p = parse_poly(&read(&args.poly)?)?;
    let params = args.params.params()?;
    let alpha = match args.params.alpha {
        Some(a) => a,
        None => params.alpha_grid[0],
    };
    let summary = run_audit(&p, &params, alpha, args.trials, args.seed, &EnumerationLimits::default())?;
    emit(&summary, &args.output)?;
    Ok(EXIT_ACCEPT)
}

/// Parses `argv` (program name first) and runs the subcommand. Returns the
/// process exit code: 0 accept or success, 1 reject or failed check, 2 error.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_ACCEPT };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Test(a) => test(a),
        Command::Learn(a) => learn(a),
        Command::Experiment(a) => experiment(a),
        Command::Verify(a) => verify(a),
        Command::Distance(a) => distance_cmd(a),
        Command::Audit(a) => audit(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
