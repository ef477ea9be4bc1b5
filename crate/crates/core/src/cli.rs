//! Command-line front end: `test`, `simulate` and `report`.
//!
//! Exit codes: 0 on a completed run, 1 on an I/O or runtime failure, 2 on a
//! usage or configuration error, 3 on malformed input data or a results
//! file with the wrong columns.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::betting::Status;
use crate::catalog::{Arity, Strategy, TestSpec};
use crate::dist::DistSpec;
use crate::error::Error;
use crate::observation::Observation;
use crate::sim::{self, csvio, ExperimentConfig};

pub const SEED_ENV: &str = "BETCRAFT_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "betcraft",
    version,
    about = "Sequential nonparametric tests by betting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestKind {
    Ks1,
    Chi2,
    Ks2,
    Mmd,
    Dominance,
    Symmetry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Plugin,
    Ew,
    Pgd,
    Kt,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Plugin => Strategy::Plugin,
            StrategyArg::Ew => Strategy::Ew,
            StrategyArg::Pgd => Strategy::Pgd,
            StrategyArg::Kt => Strategy::Kt,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one sequential test on a stream of observations.
    Test(TestArgs),
    /// Run Monte Carlo trials from a JSON experiment file.
    Simulate(SimulateArgs),
    /// Summarize power-curve CSV files.
    Report(ReportArgs),
}

#[derive(Debug, clap::Args)]
pub struct TestArgs {
    #[arg(long, value_enum)]
    pub test: TestKind,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Null distribution of a one-sample test: `uniform:a,b`,
    /// `normal:mu,sigma` or `discrete:p1,p2,...`.
    #[arg(long)]
    pub target: Option<String>,
    /// Input file, or `-` for stdin. One observation per line; two-sample
    /// lines are `x,y` with `;` between vector components.
    #[arg(long, default_value = "-")]
    pub input: String,
    #[arg(long, value_enum, default_value_t = StrategyArg::Plugin)]
    pub strategy: StrategyArg,
    /// Gaussian kernel bandwidth for `mmd`.
    #[arg(long, default_value_t = 1.0)]
    pub bandwidth: f64,
    /// Print wealth to stderr at steps 1, 2, 4, ... and at the end.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub nmax: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Master seed; overrides `BETCRAFT_SEED` and the config file.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    #[arg(required = true)]
    pub csvs: Vec<PathBuf>,
    /// Read power at the largest checkpoint not above this step.
    #[arg(long)]
    pub at: Option<u64>,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_FAILURE,
            Error::Schema(_) => EXIT_DATA,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.command {
        Command::Test(a) => cmd_test(&a, stdin, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(&a, stdout, stderr),
        Command::Report(a) => cmd_report(&a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

/// Build the test described by `test` flags.
pub fn test_spec(a: &TestArgs) -> Result<TestSpec, CliError> {
    let target = || -> Result<DistSpec, CliError> {
        let t = a
            .target
            .as_deref()
            .ok_or_else(|| CliError::usage("--target is required for one-sample tests"))?;
        Ok(t.parse::<DistSpec>()?)
    };
    let strategy = Strategy::from(a.strategy);
    let spec = match a.test {
        TestKind::Ks1 => TestSpec::Ks1 {
            target: target()?,
            strategy,
            band: None,
        },
        TestKind::Chi2 => match target()? {
            DistSpec::Discrete { pmf, support: None } => TestSpec::Chi2 { pmf, strategy },
            _ => return Err(CliError::usage("chi2 needs a `discrete:p1,p2,...` target")),
        },
        TestKind::Ks2 => TestSpec::Ks2 { band: None },
        TestKind::Mmd => TestSpec::Mmd {
            bandwidth: a.bandwidth,
            strategy,
        },
        TestKind::Dominance => TestSpec::Dominance {},
        TestKind::Symmetry => TestSpec::Symmetry {},
    };
    if a.target.is_some() && spec.arity() == Arity::Two {
        return Err(CliError::usage("--target applies only to one-sample tests"));
    }
    if a.strategy != StrategyArg::Plugin && !matches!(a.test, TestKind::Ks1 | TestKind::Chi2 | TestKind::Mmd)
    {
        return Err(CliError::usage("--strategy applies to ks1, chi2 and mmd"));
    }
    Ok(spec)
}

fn parse_components(field: &str) -> Option<Vec<f64>> {
    field.split(';').map(|c| c.trim().parse::<f64>().ok()).collect()
}

/// Parse one input line. Returns `Ok(None)` for blank and `#` lines.
pub fn parse_line(line: &str, arity: Arity) -> Result<Option<Observation>, String> {
    let t = line.trim();
    if t.is_empty() || t.starts_with('#') {
        return Ok(None);
    }
    match arity {
        Arity::One => t
            .parse::<f64>()
            .map(|v| Some(Observation::Scalar(v)))
            .map_err(|_| format!("expected one number, got `{t}`")),
        Arity::Two => {
            let (x, y) = t
                .split_once(',')
                .filter(|(_, y)| !y.contains(','))
                .ok_or_else(|| format!("expected `x,y`, got `{t}`"))?;
            let (x, y) = parse_components(x)
                .zip(parse_components(y))
                .ok_or_else(|| format!("bad number in `{t}`"))?;
            if x.len() != y.len() {
                return Err(format!("x has {} components but y has {}", x.len(), y.len()));
            }
            Ok(Some(if x.len() == 1 {
                Observation::Pair(x[0], y[0])
            } else {
                Observation::Vectors(x, y)
            }))
        }
    }
}

/// Result of streaming a test over input lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamVerdict {
    pub tau: Option<u64>,
    pub steps: u64,
}

/// Feed `input` to `spec` until it rejects or the input ends.
pub fn stream_test(
    spec: &TestSpec,
    alpha: f64,
    input: &mut dyn BufRead,
    mut trace: Option<&mut dyn Write>,
) -> Result<StreamVerdict, CliError> {
    let mut proc = spec.build(alpha)?;
    let arity = spec.arity();
    let mut next_trace = 1u64;
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let obs = match parse_line(&line, arity) {
            Ok(Some(o)) => o,
            Ok(None) => continue,
            Err(msg) => {
                return Err(CliError {
                    code: EXIT_DATA,
                    message: format!("line {line_no}: {msg}"),
                })
            }
        };
        let status = proc.observe(obs).map_err(|e| CliError {
            code: EXIT_DATA,
            message: format!("line {line_no}: {e}"),
        })?;
        let n = proc.steps();
        let stopped = matches!(status, Status::Rejected { .. });
        if let Some(w) = trace.as_deref_mut() {
            if n == next_trace || stopped {
                writeln!(w, "n={n} wealth={}", proc.statistic())?;
                while next_trace <= n {
                    next_trace *= 2;
                }
            }
        }
        if let Status::Rejected { tau } = status {
            return Ok(StreamVerdict {
                tau: Some(tau),
                steps: n,
            });
        }
    }
    let steps = proc.steps();
    if let Some(w) = trace {
        if steps > 0 && steps != next_trace / 2 {
            writeln!(w, "n={steps} wealth={}", proc.statistic())?;
        }
    }
    Ok(StreamVerdict { tau: None, steps })
}

fn cmd_test(
    a: &TestArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::usage(format!(
            "--alpha must lie in (0, 1), got {}",
            a.alpha
        )));
    }
    let spec = test_spec(a)?;
    let trace: Option<&mut dyn Write> = if a.trace { Some(stderr) } else { None };
    let verdict = if a.input == "-" {
        stream_test(&spec, a.alpha, stdin, trace)?
    } else {
        let file = File::open(&a.input).map_err(|e| CliError {
            code: EXIT_FAILURE,
            message: format!("{}: {e}", a.input),
        })?;
        stream_test(&spec, a.alpha, &mut BufReader::new(file), trace)?
    };
    match verdict.tau {
        Some(tau) => writeln!(stdout, "REJECT at n={tau}")?,
        None => writeln!(stdout, "NO-DECISION after n={}", verdict.steps)?,
    }
    Ok(())
}

/// Master seed after applying, in increasing priority, the config file,
/// `BETCRAFT_SEED` and `--seed`.
pub fn resolve_seed(config: u64, env: Option<&str>, flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        None => Ok(config),
    }
}

/// File stem for one cell of an experiment.
pub fn result_stem(experiment: &str, curve: &sim::PowerCurve) -> String {
    format!("{experiment}__{}__{}", curve.scenario, curve.test)
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let text =
        fs::read_to_string(&a.config).map_err(|e| CliError::usage(format!("{}: {e}", a.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(t) = a.trials {
        cfg.n_trials = t;
    }
    if let Some(n) = a.nmax {
        cfg.n_max = n;
    }
    let env = std::env::var(SEED_ENV).ok();
    cfg.master_seed = resolve_seed(cfg.master_seed, env.as_deref(), a.seed)?;
    if a.jobs == Some(0) {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    cfg.validate()?;
    fs::create_dir_all(&a.out)?;
    let mut rows = Vec::new();
    for plan in sim::TrialPlan::from_config(&cfg) {
        let curve = plan.run(a.jobs)?;
        for e in &curve.errors {
            writeln!(
                stderr,
                "warning: {} on `{}`, trial {}: {}",
                curve.test, curve.scenario, e.trial, e.message
            )?;
        }
        let stem = result_stem(&cfg.name, &curve);
        let power = a.out.join(format!("{stem}.csv"));
        csvio::write_power_file(&curve, &power)?;
        csvio::write_stopping_file(&curve, &sim::stopping_path(&power))?;
        rows.push(sim::summarize(&power, None)?);
    }
    stdout.write_all(sim::render(&rows).as_bytes())?;
    Ok(())
}

fn cmd_report(a: &ReportArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let rows = a
        .csvs
        .iter()
        .map(|p| summarize_path(p, a.at))
        .collect::<Result<Vec<_>, _>>()?;
    stdout.write_all(sim::render(&rows).as_bytes())?;
    Ok(())
}

fn summarize_path(p: &Path, at: Option<u64>) -> Result<sim::ReportRow, CliError> {
    sim::summarize(p, at).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", p.display(), err.message);
        err
    })
}
