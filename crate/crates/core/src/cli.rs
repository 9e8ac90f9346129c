//! Command-line front end. [`run`] takes its streams as arguments so it can be
//! driven in-process.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{LotteryError, Result};
use crate::harness::{
    compute_record, render_svg, run_study, run_verify, write_records, Method, MethodOptions,
    ParamPoint, StudyConfig, VerifyConfig,
};
use crate::markov::{monte_carlo_m, NumericMode};
use crate::params::{instantiate, RatioParams, ScaledParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "finetti",
    version,
    about = "Finitely iterated de Finetti lottery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one cell and print it as a CSV row.
    Compute(ComputeArgs),
    /// Run a convergence grid and write CSV, optionally with an SVG chart.
    Study(StudyArgs),
    /// Monte Carlo estimate of the expected final density.
    Simulate(SimulateArgs),
    /// Check the spectral identities and the closed form against the chain.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Natural density of the tracked set, in (0, 1).
    #[arg(long, requires = "alpha", conflicts_with_all = ["pi", "beta"], allow_negative_numbers = true)]
    p: Option<f64>,
    /// Iterations per natural number.
    #[arg(long, requires = "p", allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Tracked tickets per untracked ticket.
    #[arg(long, requires = "beta", allow_negative_numbers = true)]
    pi: Option<f64>,
    /// Draws per untracked ticket.
    #[arg(
        long,
        requires = "pi",
        conflicts_with = "alpha",
        allow_negative_numbers = true
    )]
    beta: Option<f64>,
}

impl ParamArgs {
    fn point(&self) -> Result<ParamPoint> {
        match (self.p, self.alpha, self.pi, self.beta) {
            (Some(p), Some(alpha), None, None) => {
                Ok(ParamPoint::Ratio(RatioParams::new(p, alpha)?))
            }
            (None, None, Some(pi), Some(beta)) => {
                Ok(ParamPoint::Scaled(ScaledParams::new(pi, beta)?))
            }
            _ => Err(LotteryError::Invalid(
                "give either --p and --alpha or --pi and --beta".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Float,
    Rational,
}

impl From<ModeArg> for NumericMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Float => NumericMode::Float64,
            ModeArg::Rational => NumericMode::ExactRational,
        }
    }
}

fn parse_method(s: &str) -> Result<Method> {
    s.parse()
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of untracked tickets; not needed for the limit.
    #[arg(long = "N")]
    n: Option<u64>,
    /// dp, closed, mc or limit.
    #[arg(long, default_value = "dp", value_parser = parse_method)]
    method: Method,
    #[arg(long, value_enum, default_value = "float")]
    mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the CSV header before the row.
    #[arg(long)]
    header: bool,
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    p_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    alpha_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<u64>,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "dp", value_parser = parse_method)]
    method: Vec<Method>,
    #[arg(long, value_enum, default_value = "float")]
    mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long = "N")]
    n: u64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    max_n: u64,
    /// Truncation order of the spectral blocks, at most 32.
    #[arg(long, default_value_t = 16)]
    trunc: usize,
    /// Allowed gap between the tree series and W/(1+W).
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

/// Parse `args` (program name first), execute, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let stream: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = stream.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.command {
        Command::Compute(a) => compute(a, out),
        Command::Study(a) => study(a, out),
        Command::Simulate(a) => simulate(a, out, err),
        Command::Verify(a) => verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &LotteryError) -> i32 {
    match e {
        LotteryError::Io(_) => EXIT_IO,
        LotteryError::Csv(c) if c.is_io_error() => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

fn compute(a: ComputeArgs, out: &mut dyn Write) -> Result<i32> {
    let point = a.params.point()?;
    let opts = MethodOptions {
        mode: a.mode.into(),
        trials: a.trials,
        seed: a.seed,
    };
    let record = compute_record(point, a.n, a.method, &opts)?;
    write_records(out, &[record], a.header)?;
    Ok(EXIT_OK)
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| LotteryError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn study(a: StudyArgs, out: &mut dyn Write) -> Result<i32> {
    let config = StudyConfig {
        p_list: a.p_list,
        alpha_list: a.alpha_list,
        n_list: a.n_list,
        methods: a.method,
        options: MethodOptions {
            mode: a.mode.into(),
            trials: a.trials,
            seed: a.seed,
        },
    };
    config.validate()?;
    let csv_file = a.out.as_ref().map(create).transpose()?;
    let svg_file = a.svg.as_ref().map(create).transpose()?;

    let rows = run_study(&config)?;
    match csv_file {
        Some(mut f) => {
            write_records(&mut f, &rows, true)?;
            f.flush()?;
        }
        None => write_records(out, &rows, true)?,
    }
    if let Some(mut f) = svg_file {
        f.write_all(render_svg(&rows).as_bytes())?;
        f.flush()?;
    }
    Ok(EXIT_OK)
}

fn simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let scaled = a.params.point()?.scaled()?;
    let inst = instantiate(scaled, a.n)?;
    let est = monte_carlo_m(&inst, a.trials, a.seed)?;
    if a.trials == 1 {
        writeln!(
            err,
            "warning: one trial gives no spread estimate; std_error reported as 0"
        )?;
    }
    writeln!(out, "mean,std_error,trials,seed")?;
    writeln!(
        out,
        "{:?},{:?},{},{}",
        est.mean, est.std_error, est.trials, est.seed
    )?;
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let report = run_verify(&VerifyConfig {
        max_n: a.max_n,
        trunc: a.trunc,
        tol: a.tol,
        inject_fault: a.inject_fault,
    })?;
    for suite in &report.suites {
        writeln!(out, "{suite}")?;
    }
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}
