//! Batch harness: generate graphs, build spanners, verify them, and emit
//! machine-readable reports.
//!
//! Exit codes: 0 all checks pass, 1 a verification check failed,
//! 2 configuration error, 3 internal protocol bug.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;

use spanner_core::gen;
use spanner_core::graph::{format_edge_list, format_edge_set, parse_edge_list, Graph, VertexId};
use spanner_core::protocol::{build_spanner, ExecutionTrace, ProtocolError};
use spanner_core::rational::parse_rational;
use spanner_core::schedule::{build_schedule, EpsilonMode, PhaseSchedule, ScheduleParams};
use spanner_core::verifier::{verify, VerificationLevel};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_PROTOCOL_BUG: u8 = 3;

#[derive(Parser)]
#[command(name = "spanner", about = "Distributed near-additive spanner toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        /// Output path (stdout if omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build a spanner and write the edge list and trace.
    Build {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        outputs: OutputArgs,
    },
    /// Re-run the deterministic construction and verify a spanner file.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Spanner edge list to verify.
        #[arg(long)]
        spanner: PathBuf,
        #[arg(long, value_enum, default_value_t = LevelArg::Full)]
        level: LevelArg,
        /// Verification report output path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build and verify in one step.
    Run {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        outputs: OutputArgs,
        #[arg(long, value_enum, default_value_t = LevelArg::Full)]
        level: LevelArg,
        /// Verification report output path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the exact parameter schedule for given settings.
    Report {
        /// Vertex count the schedule is for.
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Graph family.
    #[arg(long, value_enum)]
    kind: Kind,
    /// Vertex count (clique size for barbell).
    #[arg(long)]
    n: u32,
    /// Edge probability for gnp, as an exact fraction like 1/20.
    #[arg(long)]
    p: Option<String>,
    /// Generator seed (gnp only).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Grid rows (n is then the column count).
    #[arg(long)]
    rows: Option<u32>,
    /// Bridge length for barbell.
    #[arg(long)]
    bridge: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gnp,
    Cycle,
    Path,
    Grid,
    Barbell,
    Complete,
}

#[derive(Args)]
struct InputArgs {
    /// Input graph edge-list file.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct ParamArgs {
    /// Sparsity exponent kappa; the edge bound scales with n^(1+1/kappa)
    #[arg(long)]
    kappa: u64,
    /// Integer c with rho = 1/c.
    #[arg(long)]
    c: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Guaranteed)]
    mode: ModeArg,
    /// Epsilon argument as an exact fraction, e.g. 1/2.
    #[arg(long)]
    eps: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Guaranteed,
    Exploratory,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
    Deep,
}

impl From<LevelArg> for VerificationLevel {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Fast => VerificationLevel::Fast,
            LevelArg::Full => VerificationLevel::Full,
            LevelArg::Deep => VerificationLevel::Deep,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Spanner edge list output path.
    #[arg(long)]
    spanner: Option<PathBuf>,
    /// Trace JSON output path.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Include full member lists in the trace.
    #[arg(long)]
    verbose_trace: bool,
}

enum CliError {
    Config(String),
    ProtocolBug(String),
    CheckFailed,
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        CliError::ProtocolBug(e.to_string())
    }
}

fn config<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn load_graph(path: &PathBuf) -> Result<Graph, CliError> {
    let text = fs::read_to_string(path).map_err(config)?;
    parse_edge_list(&text).map_err(config)
}

fn make_schedule(n: u64, params: &ParamArgs) -> Result<PhaseSchedule, CliError> {
    let eps: BigRational = parse_rational(&params.eps).map_err(CliError::Config)?;
    build_schedule(&ScheduleParams {
        n,
        kappa: params.kappa,
        c: params.c,
        mode: match params.mode {
            ModeArg::Guaranteed => EpsilonMode::Guaranteed,
            ModeArg::Exploratory => EpsilonMode::Exploratory,
        },
        eps_arg: eps,
    })
    .map_err(config)
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(config),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn generate(args: &GenArgs) -> Result<Graph, CliError> {
    Ok(match args.kind {
        Kind::Gnp => {
            let p_text = args
                .p
                .as_ref()
                .ok_or_else(|| CliError::Config("gnp needs --p".into()))?;
            let p = parse_rational(p_text).map_err(CliError::Config)?;
            let zero = BigRational::from_integer(0.into());
            let one = BigRational::from_integer(1.into());
            if p < zero || p > one {
                return Err(CliError::Config(format!("p = {p_text} outside [0, 1]")));
            }
            gen::gnp(args.n, &p, args.seed)
        }
        Kind::Cycle => gen::cycle(args.n),
        Kind::Path => gen::path(args.n),
        Kind::Grid => gen::grid(args.rows.unwrap_or(args.n), args.n),
        Kind::Barbell => gen::barbell(args.n, args.bridge.unwrap_or(args.n)),
        Kind::Complete => gen::complete(args.n),
    })
}

fn build(
    graph: &Graph,
    params: &ParamArgs,
) -> Result<(PhaseSchedule, BTreeSet<(VertexId, VertexId)>, ExecutionTrace), CliError> {
    let schedule = make_schedule(u64::from(graph.n()), params)?;
    let (e_h, trace) = build_spanner(graph, &schedule)?;
    Ok((schedule, e_h, trace))
}

fn write_artifacts(
    graph: &Graph,
    e_h: &BTreeSet<(VertexId, VertexId)>,
    trace: &ExecutionTrace,
    outputs: &OutputArgs,
) -> Result<(), CliError> {
    if let Some(path) = &outputs.spanner {
        fs::write(path, format_edge_set(graph.n(), e_h)).map_err(config)?;
    }
    if let Some(path) = &outputs.trace {
        let json = trace.to_json(outputs.verbose_trace);
        fs::write(path, format!("{:#}\n", json)).map_err(config)?;
    }
    Ok(())
}

fn verify_and_report(
    graph: &Graph,
    schedule: &PhaseSchedule,
    e_h: &BTreeSet<(VertexId, VertexId)>,
    trace: &ExecutionTrace,
    level: LevelArg,
    report_path: &Option<PathBuf>,
) -> Result<(), CliError> {
    let report = verify(graph, schedule, e_h, trace, level.into());
    let mut json = report.to_json();
    json["schedule"] = schedule.to_json();
    let text = format!("{:#}\n", json);
    match report_path {
        Some(p) => fs::write(p, &text).map_err(config)?,
        None => print!("{text}"),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { gen: args, out } => {
            let g = generate(&args)?;
            write_or_print(&out, &format_edge_list(&g))
        }
        Command::Build {
            input,
            params,
            outputs,
        } => {
            let g = load_graph(&input.graph)?;
            let (_, e_h, trace) = build(&g, &params)?;
            write_artifacts(&g, &e_h, &trace, &outputs)
        }
        Command::Verify {
            input,
            params,
            spanner,
            level,
            report,
        } => {
            let g = load_graph(&input.graph)?;
            let claimed = fs::read_to_string(&spanner).map_err(config)?;
            let claimed: BTreeSet<(VertexId, VertexId)> = parse_edge_list(&claimed)
                .map_err(config)?
                .edges()
                .into_iter()
                .collect();
            let (schedule, e_h, trace) = build(&g, &params)?;
            if claimed != e_h {
                return Err(CliError::Config(format!(
                    "spanner file has {} edges but the deterministic construction yields {}",
                    claimed.len(),
                    e_h.len()
                )));
            }
            verify_and_report(&g, &schedule, &e_h, &trace, level, &report)
        }
        Command::Run {
            input,
            params,
            outputs,
            level,
            report,
        } => {
            let g = load_graph(&input.graph)?;
            let (schedule, e_h, trace) = build(&g, &params)?;
            write_artifacts(&g, &e_h, &trace, &outputs)?;
            verify_and_report(&g, &schedule, &e_h, &trace, level, &report)
        }
        Command::Report { n, params } => {
            let schedule = make_schedule(n, &params)?;
            println!("{:#}", schedule.to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(CliError::ProtocolBug(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_PROTOCOL_BUG)
        }
    }
}
