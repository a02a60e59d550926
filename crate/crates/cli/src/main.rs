//! `conicpencil`: run module pipelines on a problem file and print a JSON report.
//!
//! Exit status: 0 on success, 1 when a computation fails (for example a local
//! density that does not stabilize), 2 on input errors.

mod problem;
mod report;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use conicpencil::brauermanin::{bad_places, obstruction_scan};
use conicpencil::counting::{enumerate_n, predict_and_compare, CountOptions, DEFAULT_EXTRA_K, DEFAULT_PRIME_CUTOFF};
use conicpencil::delpezzo::{dp1_condition, dp1_minimality, dp2_minimality, dp2_ramification_quartic};
use conicpencil::interval::Interval;
use conicpencil::localsolve::{everywhere_locally_soluble, DEFAULT_PRIME_BOUND};
use conicpencil::pencil::{ConicBundleData, NormFormSystem};
use conicpencil::Error;
use serde_json::{json, Value};

use problem::{Kind, Options, Payload, ProblemFile};

#[derive(Parser)]
#[command(name = "conicpencil", version, about = "Conic bundles, local densities and Brauer-Manin scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Primes p <= cutoff enter the Euler product.
    #[arg(long = "prime-cutoff", global = true)]
    prime_cutoff: Option<u64>,
    /// Local solubility is checked at primes <= L and at the bad primes.
    #[arg(long = "L", global = true)]
    prime_bound: Option<u64>,
    /// Residue depth for p-adic searches.
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Residue-class resolution for scans at finite places.
    #[arg(long, global = true)]
    resolution: Option<u32>,
    /// Smaller selftest case counts.
    #[arg(long, global = true)]
    quick: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the payload against its module's invariants.
    Validate { file: PathBuf },
    /// Brauer group of the conic bundle.
    Brauer { file: PathBuf },
    /// Real and p-adic solubility of the norm-form system.
    Local { file: PathBuf },
    /// N(B) for every B in the schedule.
    Count { file: PathBuf },
    /// Singular-series prediction against N(B).
    Predict { file: PathBuf },
    /// Brauer-Manin obstruction scan.
    Bm { file: PathBuf },
    /// Degree 2 del Pezzo construction and minimality.
    Dp2 { file: PathBuf },
    /// Degree 1 del Pezzo condition and minimality.
    Dp1 { file: PathBuf },
    /// Built-in oracle suite.
    Selftest {
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<selftest::Fault>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Brauer { .. } => "brauer",
            Command::Local { .. } => "local",
            Command::Count { .. } => "count",
            Command::Predict { .. } => "predict",
            Command::Bm { .. } => "bm",
            Command::Dp2 { .. } => "dp2",
            Command::Dp1 { .. } => "dp1",
            Command::Selftest { .. } => "selftest",
        }
    }

    fn file(&self) -> Option<&Path> {
        match self {
            Command::Validate { file }
            | Command::Brauer { file }
            | Command::Local { file }
            | Command::Count { file }
            | Command::Predict { file }
            | Command::Bm { file }
            | Command::Dp2 { file }
            | Command::Dp1 { file } => Some(file),
            Command::Selftest { .. } => None,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn compute(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let input = matches!(
            e,
            Error::ZeroValuation
                | Error::ZeroSquareClass
                | Error::NotOddPrime(_)
                | Error::NotPrime(_)
                | Error::InvalidDiscriminant(_)
                | Error::NotPositiveNonSquare(_)
                | Error::InvalidForm(_)
                | Error::InvalidBundle(_)
                | Error::FaddeevFailure(_)
                | Error::InvalidSystem(_)
                | Error::InvalidJob(_)
                | Error::DepthTooSmall { .. }
                | Error::DegenerateParameter(_)
                | Error::InvalidBrauerElement(_)
                | Error::InsufficientPrecision { .. }
                | Error::InsolubleFibre { .. }
                | Error::InvalidPolynomial(_)
                | Error::Parse(_)
        );
        Failure {
            code: if input { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

/// What a command produced: a result, a failure, or a result that also fails validation.
struct Outcome {
    result: Option<Value>,
    failure: Option<Failure>,
}

impl From<Result<Value, Failure>> for Outcome {
    fn from(r: Result<Value, Failure>) -> Self {
        match r {
            Ok(v) => Outcome {
                result: Some(v),
                failure: None,
            },
            Err(f) => Outcome {
                result: None,
                failure: Some(f),
            },
        }
    }
}

fn flag_options(cli: &Cli) -> Options {
    Options {
        prime_cutoff: cli.prime_cutoff,
        prime_bound: cli.prime_bound,
        depth: cli.depth,
        resolution: cli.resolution,
        seed: cli.seed,
        ..Options::default()
    }
}

fn effective_options(o: &Options) -> Value {
    json!({
        "prime_cutoff": o.prime_cutoff.unwrap_or(DEFAULT_PRIME_CUTOFF),
        "L": o.prime_bound.unwrap_or(DEFAULT_PRIME_BOUND),
        "depth": o.depth,
        "resolution": o.resolution,
        "extra_k": o.extra_k.unwrap_or(DEFAULT_EXTRA_K),
        "support": o.support,
        "seed": o.seed,
    })
}

fn not_applicable(command: &str, kind: Kind) -> Failure {
    Failure::input(format!("command {command} does not apply to kind {kind}"))
}

fn bundle_of(command: &str, problem: &ProblemFile) -> Result<ConicBundleData, Failure> {
    Ok(match problem.payload() {
        Payload::Pencil(p) => p.build()?,
        Payload::QuadricIntersection(q) => q.build()?.bundle,
        Payload::Dp2(d) => d.build()?.bundle()?.data,
        Payload::Dp1(d) => dp1_minimality(&d.build()?)?.contracted,
        _ => return Err(not_applicable(command, problem.kind)),
    })
}

fn system_of(command: &str, problem: &ProblemFile) -> Result<(NormFormSystem, Option<Value>), Failure> {
    Ok(match problem.payload() {
        Payload::System(s) => (s.build()?, None),
        Payload::CountJob(j) => (j.build()?.system, None),
        Payload::Pencil(p) => {
            let t = p.build()?.torsor_system()?;
            let echo = report::torsor(&t);
            (t.system, Some(echo))
        }
        _ => return Err(not_applicable(command, problem.kind)),
    })
}

fn validate(problem: &ProblemFile) -> Outcome {
    let run = || -> Result<Outcome, Failure> {
        let value = match problem.payload() {
            Payload::Pencil(p) => {
                let data = p.build()?;
                json!({ "bundle": report::bundle(&data), "validation": report::validation(&data.validate()?) })
            }
            Payload::System(s) => {
                let sys = s.build()?;
                json!({
                    "system": report::system(&sys),
                    "r": sys.r(),
                    "s": sys.s(),
                    "bad_primes": sys.bad_primes()?,
                })
            }
            Payload::CountJob(j) => {
                let check = j.build()?.check()?;
                let value = json!({ "check": report::job_check(&check) });
                if !check.all_ok() {
                    return Ok(Outcome {
                        result: Some(value),
                        failure: Some(Failure::input(check.problems.join("; "))),
                    });
                }
                value
            }
            Payload::Dp2(d) => json!({ "bundle": report::fgh(&d.build()?.bundle()?) }),
            Payload::Dp1(d) => {
                d.build()?;
                json!({ "valid": true })
            }
            Payload::QuadricIntersection(q) => report::quadric(&q.build()?),
        };
        Ok(Ok(value).into())
    };
    run().unwrap_or_else(|f| Err(f).into())
}

fn execute(command: &Command, problem: &ProblemFile, opts: &Options) -> Result<Value, Failure> {
    let name = command.name();
    match command {
        Command::Validate { .. } | Command::Selftest { .. } => unreachable!("handled by the caller"),
        Command::Brauer { .. } => {
            let data = bundle_of(name, problem)?;
            Ok(json!({ "bundle": report::bundle(&data), "brauer": report::brauer(&data.brauer_group()?) }))
        }
        Command::Local { .. } => {
            let (system, torsor) = system_of(name, problem)?;
            let bound = opts.prime_bound.unwrap_or(DEFAULT_PRIME_BOUND);
            let r = everywhere_locally_soluble(&system, bound, opts.depth)?;
            Ok(json!({ "torsor": torsor, "system": report::system(&system), "local": report::local(&r) }))
        }
        Command::Count { .. } => {
            let Payload::CountJob(j) = problem.payload() else {
                return Err(not_applicable(name, problem.kind));
            };
            let job = j.build()?;
            let rows = job
                .schedule
                .iter()
                .map(|&b| Ok((b, enumerate_n(&job, b)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(json!({ "check": report::job_check(&job.check()?), "counts": report::counts(&rows) }))
        }
        Command::Predict { .. } => {
            let Payload::CountJob(j) = problem.payload() else {
                return Err(not_applicable(name, problem.kind));
            };
            let job = j.build()?;
            let count_opts = CountOptions {
                prime_cutoff: opts.prime_cutoff.unwrap_or(DEFAULT_PRIME_CUTOFF),
                extra_k: opts.extra_k.unwrap_or(DEFAULT_EXTRA_K),
                ..CountOptions::default()
            };
            let p = predict_and_compare::<Interval>(&job, &count_opts)?;
            Ok(json!({ "check": report::job_check(&job.check()?), "prediction": report::prediction(&p) }))
        }
        Command::Bm { .. } => {
            let data = bundle_of(name, problem)?;
            let support = match opts.support_places().map_err(Failure::input)? {
                Some(s) => s.into_iter().collect(),
                None => bad_places(&data)?,
            };
            let table = obstruction_scan(&data, &support, opts.resolution)?;
            Ok(json!({ "bundle": report::bundle(&data), "scan": report::scan(&table) }))
        }
        Command::Dp2 { .. } => {
            let Payload::Dp2(d) = problem.payload() else {
                return Err(not_applicable(name, problem.kind));
            };
            let data = d.build()?;
            let b = data.bundle()?;
            Ok(json!({
                "bundle": report::fgh(&b),
                "ramification_quartic": report::quartic(&dp2_ramification_quartic(&data)?),
                "minimality": report::minimality(&dp2_minimality(&data)?),
                "brauer": report::brauer(&b.data.brauer_group()?),
            }))
        }
        Command::Dp1 { .. } => {
            let Payload::Dp1(d) = problem.payload() else {
                return Err(not_applicable(name, problem.kind));
            };
            let data = d.build()?;
            Ok(json!({
                "condition": report::dp1_condition(&dp1_condition(&data)),
                "minimality": report::dp1_minimality(&dp1_minimality(&data)?),
            }))
        }
    }
}

fn load(path: &Path) -> Result<ProblemFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    ProblemFile::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("conicpencil: cannot configure thread pool: {e}");
        }
    }
    let started = Instant::now();
    let flags = flag_options(&cli);

    let mut input = Value::Null;
    let mut options = effective_options(&flags);
    let outcome = match &cli.command {
        Command::Selftest { inject_fault } => {
            let cfg = selftest::Config {
                quick: cli.quick,
                seed: cli.seed.unwrap_or(0),
                fault: *inject_fault,
            };
            let (ok, value) = selftest::run(&cfg);
            Outcome {
                result: Some(value),
                failure: (!ok).then(|| Failure::compute("selftest failures")),
            }
        }
        command => match load(command.file().expect("file-based command")) {
            Err(f) => Err(f).into(),
            Ok(problem) => {
                let merged = problem.options.merged(&flags);
                options = effective_options(&merged);
                input = serde_json::to_value(&problem).unwrap_or(Value::Null);
                match merged.check() {
                    Err(e) => Err(Failure::input(e)).into(),
                    Ok(()) if matches!(command, Command::Validate { .. }) => validate(&problem),
                    Ok(()) => execute(command, &problem, &merged).into(),
                }
            }
        },
    };

    let (status, error) = match &outcome.failure {
        None => ("ok", Value::Null),
        Some(f) if f.code == 2 => ("input-error", Value::String(f.message.clone())),
        Some(f) => ("computation-error", Value::String(f.message.clone())),
    };
    let report = json!({
        "schema": report::SCHEMA,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "input": input,
        "options": options,
        "status": status,
        "error": error,
        "result": outcome.result,
        "timings": { "total_ms": started.elapsed().as_secs_f64() * 1e3 },
    });
    let text = serde_json::to_string_pretty(&report).expect("JSON values serialize") + "\n";
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("conicpencil: {e}");
        return ExitCode::from(2);
    }
    if let Some(f) = &outcome.failure {
        eprintln!("conicpencil: {}", f.message);
        return ExitCode::from(f.code);
    }
    ExitCode::SUCCESS
}
