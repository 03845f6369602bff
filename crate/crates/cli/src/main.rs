//! `squareknap`: solve, verify, render, generate and benchmark square
//! knapsack instances.
//!
//! Exit codes: 0 success, 1 infeasible packing (or benchmark with
//! infeasible output), 2 unreadable or invalid input, 3 exact solver out of
//! budget (the best packing found is still written, marked `incomplete`).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use squareknap::format::{parse_instance, parse_packing, parse_schedule_spec, FormatError, Instance, PackingDoc};
use squareknap::harness::{generate, parse_corpus_spec, solve, Algorithm, Family, InstanceSpec, SolveConfig};
use squareknap::render::render_svg;
use squareknap::schedule::{ScheduleSpec, ThresholdSchedule};
use squareknap::{Bin, Scalar};

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;

/// Epsilon used when neither the command line nor the instance gives one.
const DEFAULT_EPSILON: &str = "1/8";

/// Schedule used by `gen`: large squares at least 1/4, small at most 1/64.
const GEN_SCHEDULE: &str = r#"{"base": "1/4", "growth": 3}"#;

#[derive(Parser)]
#[command(name = "squareknap", version, about = "Pack a maximum-profit subset of squares into a rectangular bin")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write the packing as JSON.
    Solve {
        #[arg(long, value_parser = parse_algorithm)]
        algo: Algorithm,
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<Scalar>,
        /// JSON file `{"base": r, "growth": k}` overriding the threshold schedule.
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Check a packing against its instance.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        packing: PathBuf,
    },
    /// Draw a feasible packing as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        packing: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a benchmark corpus and write per-run CSV.
    Bench {
        /// JSON corpus description.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e| format!("{e}"))
}

/// Error carrying the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_INPUT, message: message.to_string() }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::input(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the same directory so that a failed
/// command never leaves a partial file behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let fail = |e: &dyn std::fmt::Display| Failure::input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_schedule(path: Option<&PathBuf>) -> Result<Option<ScheduleSpec>, Failure> {
    path.map(|p| {
        let text = read(p)?;
        parse_schedule_spec(&text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
    })
    .transpose()
}

fn threshold_schedule(
    epsilon: Option<Scalar>,
    file_epsilon: Option<&Scalar>,
    spec: Option<&ScheduleSpec>,
) -> Result<ThresholdSchedule, Failure> {
    let eps = epsilon.or_else(|| file_epsilon.cloned()).unwrap_or_else(|| DEFAULT_EPSILON.parse().expect("valid"));
    ThresholdSchedule::from_spec(eps, spec).map_err(Failure::input)
}

fn cmd_solve(
    algo: Algorithm,
    input: &Path,
    out: Option<&Path>,
    epsilon: Option<Scalar>,
    schedule: Option<&PathBuf>,
) -> Result<u8, Failure> {
    let inst = load_instance(input)?;
    let spec = load_schedule(schedule)?.or_else(|| inst.schedule.clone());
    let schedule = threshold_schedule(epsilon, inst.epsilon.as_ref(), spec.as_ref())?;
    let solution = solve(algo, &inst.items, &inst.bin, &SolveConfig::new(schedule)).map_err(Failure::input)?;

    let mut doc = PackingDoc::from_packing(&solution.packing);
    doc.algorithm = Some(algo.name().to_string());
    doc.branch = solution.branch.map(|b| b.label().to_string());
    if matches!(algo, Algorithm::Exact | Algorithm::CornerExact) {
        doc.status = Some(if solution.complete { "optimal" } else { "incomplete" }.to_string());
    }
    match out {
        Some(path) => write_atomic(path, &doc.to_json())?,
        None => print!("{}", doc.to_json()),
    }

    eprintln!("profit {} with {} of {} squares ({algo})", doc.profit, solution.packing.len(), inst.items.len());
    if let Some(report) = &solution.report {
        let st = &report.stats;
        eprintln!(
            "branch {} at dropped class {}; {} corner states{}{}; {} dissections, {} large-resource runs",
            report.branch,
            report.chosen_index,
            st.corner_states,
            if st.corner_truncated { " (truncated)" } else { "" },
            if st.large_fallback { ", greedy fallback for many large squares" } else { "" },
            st.dissections,
            st.ptas_runs,
        );
        if st.slack_discrepancies > 0 {
            eprintln!("near-full slack tests disagreed on {} corner states", st.slack_discrepancies);
        }
    }
    if !doc.feasible {
        eprintln!("internal error: the packing is infeasible");
        return Ok(EXIT_INFEASIBLE);
    }
    if !solution.complete {
        eprintln!("search budget exhausted after {} nodes; the packing is the best found, not proven optimal", solution.nodes);
        return Ok(EXIT_INCOMPLETE);
    }
    Ok(0)
}

fn cmd_verify(input: &Path, packing: &Path) -> Result<u8, Failure> {
    let inst = load_instance(input)?;
    let p = parse_packing(&read(packing)?, &inst)?;
    match p.check() {
        Ok(()) => {
            eprintln!("feasible: {} squares, profit {}", p.len(), p.profit());
            Ok(0)
        }
        Err(v) => {
            eprintln!("infeasible: {v}");
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn cmd_render(input: &Path, packing: &Path, out: &Path) -> Result<u8, Failure> {
    let inst = load_instance(input)?;
    let p = parse_packing(&read(packing)?, &inst)?;
    match render_svg(&p) {
        Ok(svg) => {
            write_atomic(out, &svg)?;
            Ok(0)
        }
        Err(v) => {
            eprintln!("refusing to render an infeasible packing: {v}");
            Ok(EXIT_INFEASIBLE)
        }
    }
}

/// Instances are generated against `GEN_SCHEDULE` at the default epsilon and
/// record both, so `solve` picks them up unless told otherwise.
fn cmd_gen(seed: u64, n: usize, family: Family, out: &Path) -> Result<u8, Failure> {
    let spec = parse_schedule_spec(GEN_SCHEDULE).expect("valid schedule");
    let schedule = threshold_schedule(None, None, Some(&spec))?;
    let ispec = InstanceSpec {
        seed,
        n,
        family,
        profit: family.default_profit(),
        bin: Bin::unit(),
        schedule,
    };
    let inst = generate(&ispec).map_err(Failure::input)?;
    write_atomic(out, &inst.to_json())?;
    Ok(0)
}

fn cmd_bench(corpus: &Path, out: &Path) -> Result<u8, Failure> {
    let spec = parse_corpus_spec(&read(corpus)?).map_err(|e| Failure::input(format!("{}: {e}", corpus.display())))?;
    let report = spec.run().map_err(Failure::input)?;
    write_atomic(out, &report.to_csv())?;
    print!("{}", report.summary());
    if report.feasibility_failures() > 0 {
        eprintln!("{} infeasible packings", report.feasibility_failures());
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(0)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("SQUAREKNAP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::input(format!("SQUAREKNAP_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(Failure::input)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    match cli.command {
        Command::Solve { algo, input, out, epsilon, schedule } => {
            cmd_solve(algo, &input, out.as_deref(), epsilon, schedule.as_ref())
        }
        Command::Verify { input, packing } => cmd_verify(&input, &packing),
        Command::Render { input, packing, out } => cmd_render(&input, &packing, &out),
        Command::Gen { seed, n, family, out } => cmd_gen(seed, n, family, &out),
        Command::Bench { corpus, out } => cmd_bench(&corpus, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => {
            let _ = io::stdout().flush();
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
