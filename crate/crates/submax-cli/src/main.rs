//! Benchmark harness for the submax solvers.
//!
//! Subcommands: `solve` runs one algorithm on one instance file and prints a
//! CSV row; `compare` runs all three algorithms against the grid-search
//! oracle and checks each guarantee; `check` runs the empirical property
//! checkers on an instance file.
//!
//! Exit codes: 0 success / all PASS, 1 property or bound FAIL, 2 input
//! error, 3 oracle point cap exceeded.

mod instance;

use std::f64::consts::E;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use instance::InstanceFile;
use submax::objectives::{check_dr, check_monotone, check_submodular};
use submax::oracle::grid_optimum;
use submax::solvers::{coordinate_ascent, enhanced_ca, fully_enhanced_ca, CaConfig};
use submax::{Error, ProblemInstance, SolveResult};

const CSV_HEADER: &str =
    "instance,algorithm,epsilon,value,opt_value,ratio,bound,iterations,evaluations,wall_millis,workers";

#[derive(Parser)]
#[command(name = "submax", about = "Continuous submodular maximization benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on an instance file and print a CSV row.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Print the per-iteration trace to stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run all three solvers against the grid oracle and check each bound.
    Compare {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Grid oracle resolution; defaults to B/50.
        #[arg(long)]
        oracle_resolution: Option<f64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the empirical property checkers on an instance file.
    Check {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Ca,
    Eca,
    Feca,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Ca => "ca",
            Algorithm::Eca => "eca",
            Algorithm::Feca => "feca",
        }
    }
}

/// Failures carrying the process exit code.
enum CliError {
    /// Exit 1: a property check or guarantee bound failed.
    Fail,
    /// Exit 2: unreadable, unparsable or invalid input.
    Input(String),
    /// Exit 3: the oracle point cap was exceeded.
    OracleCap(String),
}

impl From<String> for CliError {
    fn from(msg: String) -> Self {
        CliError::Input(msg)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::GridCapExceeded { .. } => CliError::OracleCap(err.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(CliError::Fail) => 1,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::OracleCap(msg)) => {
            eprintln!("error: {msg}");
            3
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            instance,
            algorithm,
            epsilon,
            workers,
            trace,
            output,
        } => cmd_solve(&instance, algorithm, epsilon, workers, trace, output),
        Command::Compare {
            instance,
            epsilon,
            oracle_resolution,
            workers,
            output,
        } => cmd_compare(&instance, epsilon, oracle_resolution, workers, output),
        Command::Check {
            instance,
            trials,
            seed,
            output,
        } => cmd_check(&instance, trials, seed, output),
    }
}

fn open_output(path: Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(&p)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(file))
        }
        None => Ok(Box::new(std::io::stdout())),
    }
}

/// Formats a real with 12 significant digits.
fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

fn validated_config(epsilon: f64) -> Result<CaConfig, CliError> {
    let cfg = CaConfig::new(epsilon);
    cfg.validate().map_err(CliError::from)?;
    Ok(cfg)
}

struct Run {
    result: SolveResult,
    wall_millis: u128,
}

fn run_algorithm(
    algorithm: Algorithm,
    instance: &ProblemInstance,
    cfg: &CaConfig,
    workers: usize,
) -> Result<Run, CliError> {
    let start = Instant::now();
    let result = match algorithm {
        Algorithm::Ca => coordinate_ascent(instance, cfg)?,
        Algorithm::Eca => enhanced_ca(instance, cfg)?,
        Algorithm::Feca => fully_enhanced_ca(instance, cfg, workers)?,
    };
    Ok(Run {
        result,
        wall_millis: start.elapsed().as_millis(),
    })
}

#[allow(clippy::too_many_arguments)]
fn csv_row(
    name: &str,
    algorithm: Algorithm,
    epsilon: f64,
    run: &Run,
    opt: Option<f64>,
    bound_fraction: Option<f64>,
    workers: usize,
) -> String {
    let (opt_s, ratio_s, bound_s) = match opt {
        Some(opt) => {
            let ratio = if opt > 0.0 { run.result.value / opt } else { 1.0 };
            (
                sig(opt),
                sig(ratio),
                sig(bound_fraction.unwrap_or(0.0)),
            )
        }
        None => (String::new(), String::new(), String::new()),
    };
    format!(
        "{name},{alg},{eps},{value},{opt_s},{ratio_s},{bound_s},{iters},{evals},{wall},{workers}",
        alg = algorithm.name(),
        eps = sig(epsilon),
        value = sig(run.result.value),
        iters = run.result.main_iterations,
        evals = run.result.evaluations,
        wall = run.wall_millis,
    )
}

fn cmd_solve(
    path: &std::path::Path,
    algorithm: Algorithm,
    epsilon: f64,
    workers: usize,
    trace: bool,
    output: Option<PathBuf>,
) -> Result<(), CliError> {
    let file = InstanceFile::load(path)?;
    let instance = file.build()?;
    let cfg = validated_config(epsilon)?.with_trace(trace && algorithm == Algorithm::Ca);
    let run = run_algorithm(algorithm, &instance, &cfg, workers)?;
    if trace {
        match &run.result.trace {
            Some(entries) => {
                for e in entries {
                    eprintln!("iteration {}: value {} at {:?}", e.iteration, e.value, e.point.coords());
                }
            }
            None => eprintln!("trace is only recorded for the plain ca algorithm"),
        }
    }
    let mut out = open_output(output)?;
    writeln!(out, "{CSV_HEADER}").map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(
        out,
        "{}",
        csv_row(&file.name, algorithm, epsilon, &run, None, None, workers)
    )
    .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(())
}

/// The guarantee's right-hand side for one algorithm on one instance.
fn bound_rhs(algorithm: Algorithm, instance: &ProblemInstance, epsilon: f64, opt: f64) -> f64 {
    let b = instance.budget();
    let l = instance.objective().smoothness();
    match algorithm {
        Algorithm::Ca => {
            let u_max = instance.domain().upper().iter().cloned().fold(0.0, f64::max);
            (1.0 - 1.0 / E - u_max / b - epsilon) * opt - epsilon * b * l
        }
        Algorithm::Eca => ((E - 1.0) / (2.0 * E - 1.0) - 2.0 * epsilon) * opt - epsilon * b * l,
        Algorithm::Feca => (1.0 - 1.0 / E - 4.0 * epsilon) * opt - epsilon * (b + 2.0) * l,
    }
}

fn cmd_compare(
    path: &std::path::Path,
    epsilon: f64,
    oracle_resolution: Option<f64>,
    workers: usize,
    output: Option<PathBuf>,
) -> Result<(), CliError> {
    let file = InstanceFile::load(path)?;
    let instance = file.build()?;
    let cfg = validated_config(epsilon)?;
    let resolution = oracle_resolution.unwrap_or(instance.budget() / 50.0);
    let oracle = grid_optimum(&instance, resolution)?;
    let opt = oracle.best_value;

    let mut out = open_output(output)?;
    let mut write = |line: &str| -> Result<(), CliError> {
        writeln!(out, "{line}").map_err(|e| CliError::Input(e.to_string()))
    };
    write(CSV_HEADER)?;

    let mut all_pass = true;
    let mut verdicts = Vec::new();
    for algorithm in [Algorithm::Ca, Algorithm::Eca, Algorithm::Feca] {
        let run = run_algorithm(algorithm, &instance, &cfg, workers)?;
        let rhs = bound_rhs(algorithm, &instance, epsilon, opt);
        let bound_fraction = if opt > 0.0 { rhs / opt } else { 0.0 };
        let pass = opt <= 0.0 || run.result.value >= rhs - 1e-9 * opt.abs().max(1.0);
        all_pass &= pass;
        write(&csv_row(
            &file.name,
            algorithm,
            epsilon,
            &run,
            Some(opt),
            Some(bound_fraction),
            workers,
        ))?;
        verdicts.push((algorithm, pass));
    }
    for (algorithm, pass) in verdicts {
        write(&format!(
            "{}: {}",
            algorithm.name(),
            if pass { "PASS" } else { "FAIL" }
        ))?;
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Fail)
    }
}

fn cmd_check(
    path: &std::path::Path,
    trials: u64,
    seed: u64,
    output: Option<PathBuf>,
) -> Result<(), CliError> {
    if trials < 1 {
        return Err(CliError::Input("trials must be at least 1".into()));
    }
    let file = InstanceFile::load(path)?;
    let (objective, domain) = file.build_unchecked()?;

    let submodular = check_submodular(&objective, &domain, trials, seed)?;
    let monotone = check_monotone(&objective, &domain, trials, seed)?;
    let dr = check_dr(&objective, &domain, trials, seed)?;

    let mut out = open_output(output)?;
    let mut write = |line: &str| -> Result<(), CliError> {
        writeln!(out, "{line}").map_err(|e| CliError::Input(e.to_string()))
    };
    write("property,trials,violations,worst_violation")?;
    for (name, report) in [
        ("submodular", &submodular),
        ("monotone", &monotone),
        ("dr", &dr),
    ] {
        write(&format!(
            "{name},{},{},{}",
            report.trials,
            report.violations,
            sig(report.worst_violation)
        ))?;
        if !report.clean() {
            if let Some((x, y)) = report.witnesses.first() {
                write(&format!("# {name} witness: x = {x:?}, y = {y:?}"))?;
            }
        }
    }
    // Diminishing returns is informational: the solvers only need the weaker
    // submodularity property.
    if submodular.clean() && monotone.clean() {
        Ok(())
    } else {
        Err(CliError::Fail)
    }
}
