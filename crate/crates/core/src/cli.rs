//! Command-line surface.
//!
//! A character modulo `2^m` is given as a pair `(c, s)`: `chi(-1) = s` with
//! `s` in `{1, -1}` and `chi(5) = exp(2 pi i c / 2^(m-2))` with `c` in
//! `[1, 2^(m-2)]`. So `c = 2^(m-2)` with `s = 1` is the principal character.
//!
//! Exit codes: 0 success, 1 mismatch, 2 usage, 3 modulus above the cap,
//! 4 I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::evaluator::evaluate;
use crate::instance::SumProblem;
use crate::oracle::brute_force;
use crate::sweep::{self, Grid, Sampler, DEFAULT_KS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Exact evaluation of character sums modulo powers of two.
#[derive(Debug, Parser)]
#[command(name = "charsum", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one instance by closed form, brute force, or both.
    Eval(EvalArgs),
    /// Compare closed form and brute force over sampled or enumerated instances.
    Check(CheckArgs),
    /// Time closed form against brute force.
    Bench(BenchArgs),
    /// Write a CSV table over a full parameter grid.
    Grid(GridArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Closed,
    Brute,
    Both,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long = "A", allow_negative_numbers = true)]
    pub a: i64,
    #[arg(long = "B", allow_negative_numbers = true)]
    pub b: i64,
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub c1: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub s1: i64,
    #[arg(long)]
    pub c2: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub s2: i64,
}

impl InstanceArgs {
    fn problem(&self) -> Result<SumProblem, Error> {
        SumProblem::from_params(
            self.m, self.a, self.b, self.k, self.c1, self.s1, self.c2, self.s2,
        )
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct JobsArg {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = "CHARSUM_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 6)]
    pub m_min: u32,
    #[arg(long, default_value_t = 12)]
    pub m_max: u32,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Enumerate every character pair, A, B and k instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
    /// Exponents k used by --exhaustive.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_KS)]
    pub k: Vec<u64>,
    #[command(flatten)]
    pub jobs: JobsArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Modulus exponents to time; a large-regime instance is chosen for each
    /// unless instance flags are given.
    #[arg(long, value_delimiter = ',', default_values_t = [16u32, 20, 24])]
    pub m: Vec<u32>,
    #[arg(long = "A", allow_negative_numbers = true, requires_all = ["b", "k", "c1", "s1", "c2", "s2"])]
    pub a: Option<i64>,
    #[arg(long = "B", allow_negative_numbers = true)]
    pub b: Option<i64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub c1: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s1: Option<i64>,
    #[arg(long)]
    pub c2: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s2: Option<i64>,
    /// Closed-form repetitions; the median is reported.
    #[arg(long, default_value_t = 201)]
    pub reps: u32,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub m_min: u32,
    #[arg(long, default_value_t = 5)]
    pub m_max: u32,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4])]
    pub k: Vec<u64>,
    /// Restrict to odd B.
    #[arg(long)]
    pub odd_b: bool,
    #[command(flatten)]
    pub jobs: JobsArg,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(std::io::Error),
    Csv(csv::Error),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Lib(e) if e.is_width_cap() => EXIT_CAP,
            Failure::Lib(Error::Internal(_)) => EXIT_MISMATCH,
            Failure::Lib(_) => EXIT_USAGE,
            Failure::Io(_) | Failure::Csv(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "I/O error: {e}"),
            Failure::Csv(e) => write!(f, "CSV error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Csv(e)
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. JSON goes to `out`, diagnostics to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Check(a) => cmd_check(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::Grid(a) => cmd_grid(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("charsum: {f}");
            f.exit_code()
        }
    }
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = args.instance.problem()?;
    let closed = match args.method {
        Method::Brute => None,
        _ => Some(evaluate(&p)?),
    };
    let oracle = match args.method {
        Method::Closed => None,
        _ => Some(brute_force(&p)),
    };
    let matched = match (&closed, &oracle) {
        (Some(cf), Some(o)) => Some(cf.value == *o && sweep::magnitude_consistent(cf)),
        _ => None,
    };
    let mut doc = json!({ "instance": p });
    if let Some(cf) = &closed {
        doc["closed_form"] = serde_json::to_value(cf).map_err(std::io::Error::from)?;
    }
    if let Some(o) = &oracle {
        let (re, im) = o.approx_complex();
        doc["oracle"] = json!({ "value": o, "approx": { "re": re, "im": im } });
    }
    if let Some(m) = matched {
        doc["match"] = json!(m);
    }
    emit(out, &doc)?;
    Ok(if matched == Some(false) { EXIT_MISMATCH } else { EXIT_OK })
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let report = if args.exhaustive {
        let grid = Grid::new(args.m_min, args.m_max, args.k.clone(), false)?;
        sweep::with_jobs(args.jobs.jobs, || sweep::check_grid(&grid))?
    } else {
        let sampler = Sampler::new(args.m_min, args.m_max, args.seed)?;
        sweep::with_jobs(args.jobs.jobs, || sweep::check_samples(&sampler, args.samples))?
    };
    emit(out, &report)?;
    Ok(if report.is_clean() { EXIT_OK } else { EXIT_MISMATCH })
}

/// A large-regime instance with a nonzero sum modulo `2^m`, `m >= 8`:
/// `A = 2`, `B = 1`, `k = 1`, `chi1 = (2, 1)` and the first `chi2 = (c2, 1)`
/// that does not vanish.
pub fn bench_instance(m: u32) -> Result<SumProblem, Error> {
    let mut last = Err(Error::Precondition("no large-regime instance found"));
    for c2 in (1..1u64 << (m - 2)).step_by(2).take(64) {
        let p = SumProblem::from_params(m, 2, 1, 1, 2, 1, c2, 1)?;
        if evaluate(&p)?.case.is_large() {
            return Ok(p);
        }
        last = Ok(p);
    }
    last.and(Err(Error::Precondition("no large-regime instance found")))
}

#[derive(Debug, Serialize)]
struct BenchEntry {
    instance: SumProblem,
    case: String,
    closed_form_s: f64,
    brute_force_s: f64,
    ratio: f64,
    #[serde(rename = "match")]
    matched: bool,
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut entries = Vec::new();
    let mut all_match = true;
    for &m in &args.m {
        let p = match (args.a, args.b, args.k, args.c1, args.s1, args.c2, args.s2) {
            (Some(a), Some(b), Some(k), Some(c1), Some(s1), Some(c2), Some(s2)) => {
                SumProblem::from_params(m, a, b, k, c1, s1, c2, s2)?
            }
            _ => bench_instance(m)?,
        };
        let closed_s = median_time(args.reps.max(1), || evaluate(&p))?;
        let cf = evaluate(&p)?;
        let start = Instant::now();
        let oracle = brute_force(&p);
        let brute_s = start.elapsed().as_secs_f64();
        let matched = cf.value == oracle;
        all_match &= matched;
        entries.push(BenchEntry {
            instance: p,
            case: cf.case.to_string(),
            closed_form_s: closed_s,
            brute_force_s: brute_s,
            ratio: brute_s / closed_s.max(1e-9),
            matched,
        });
    }
    emit(out, &json!({ "runs": entries }))?;
    Ok(if all_match { EXIT_OK } else { EXIT_MISMATCH })
}

/// Median wall time of `reps` calls, in seconds.
pub fn median_time<T>(reps: u32, mut f: impl FnMut() -> Result<T, Error>) -> Result<f64, Error> {
    let mut times = Vec::with_capacity(reps as usize);
    for _ in 0..reps {
        let start = Instant::now();
        std::hint::black_box(f()?);
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    Ok(times[times.len() / 2])
}

fn cmd_grid(args: &GridArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let grid = Grid::new(args.m_min, args.m_max, args.k.clone(), args.odd_b)?;
    let rows = sweep::with_jobs(args.jobs.jobs, || sweep::grid_rows(&grid))?;
    let mut writer = csv::Writer::from_path(&args.out)?;
    for row in &rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    let mismatches = rows.iter().filter(|r| !r.matched).count();
    emit(
        out,
        &json!({ "out": args.out, "rows": rows.len(), "mismatches": mismatches }),
    )?;
    Ok(if mismatches == 0 { EXIT_OK } else { EXIT_MISMATCH })
}

/// Header row of the `grid` CSV.
pub const CSV_HEADER: &str = "m,A,B,k,c1,s1,c2,s2,case,magnitude_halves,match,re,im";

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let code = run(std::iter::once("charsum").chain(args.iter().copied()), &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn eval_worked_example() {
        let (code, out) = run_str(&[
            "eval", "--m", "7", "--A", "2", "--B", "1", "--k", "1", "--c1", "2", "--s1", "1", "--c2",
            "1", "--s2", "1", "--method", "both",
        ]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["match"], true);
        assert_eq!(v["closed_form"]["case"], "LargeEven");
    }

    #[test]
    fn usage_and_cap_codes() {
        assert_eq!(run_str(&["eval", "--m", "7"]).0, EXIT_USAGE);
        let base = ["--A", "2", "--B", "1", "--k", "1", "--c1", "1", "--s1", "1", "--c2", "1"];
        let mut args = vec!["eval", "--m", "31"];
        args.extend(base);
        args.extend(["--s2", "1"]);
        assert_eq!(run_str(&args).0, EXIT_CAP);
        let mut args = vec!["eval", "--m", "7"];
        args.extend(base);
        args.extend(["--s2", "2"]);
        assert_eq!(run_str(&args).0, EXIT_USAGE);
    }

    #[test]
    fn bench_instances_are_large() {
        for m in [8, 12, 16] {
            let p = bench_instance(m).unwrap();
            assert!(evaluate(&p).unwrap().case.is_large());
        }
    }
}
