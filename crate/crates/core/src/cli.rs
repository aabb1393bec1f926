//! Command-line interface. The `minmax-fne` binary only forwards its arguments to [`run_cli`].
//!
//! Exit codes: 0 success, 1 failed checks or runtime errors, 2 malformed configuration or
//! arguments, 3 budget exceeded (either refused up front or exhausted by the adaptive rule).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;

use crate::error::{Error, Result};
use crate::harness::bench::{run_bench, sweep, write_bench_csv};
use crate::harness::checks::run_checks;
use crate::harness::config::{ModeChoice, RunConfig, CONFIG_SCHEMA};
use crate::harness::plot::write_trace_svg;
use crate::harness::problems::{build_problem, ProblemDims, FAMILIES};
use crate::harness::trace_io::{read_trace_csv, write_summary_json, write_trace_csv, RunSummary};
use crate::saddle::{complexity_factors, fne_search, plan, SearchOptions, Selection, SolveStatus, Termination};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "minmax-fne", version, about = "Approximate first-order Nash equilibria of nonconvex-concave min-max problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the solver schedule and budget as JSON.
    Schedule(RunArgs),
    /// Run the search; write the trace CSV and summary JSON.
    Solve(RunArgs),
    /// Run the invariant suite.
    Check,
    /// Sweep problems and tolerances; write an aggregate CSV.
    Bench(BenchArgs),
    /// Render a convergence plot (SVG) from a trace CSV.
    Plot(PlotArgs),
    /// Print the JSON schema of configuration files.
    Schema,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Concave,
    StronglyConcave,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TerminationArg {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SelectArg {
    Step,
    Gradnorm,
}

impl From<TerminationArg> for Termination {
    fn from(t: TerminationArg) -> Self {
        match t {
            TerminationArg::Fixed => Termination::Fixed,
            TerminationArg::Adaptive => Termination::Adaptive,
        }
    }
}

impl From<SelectArg> for Selection {
    fn from(s: SelectArg) -> Self {
        match s {
            SelectArg::Step => Selection::Step,
            SelectArg::Gradnorm => Selection::GradNorm,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON configuration file (see `minmax-fne schema`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem family, overriding the config.
    #[arg(long)]
    problem: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eps_x: Option<f64>,
    #[arg(long)]
    eps_y: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    termination: Option<TerminationArg>,
    #[arg(long, value_enum)]
    select: Option<SelectArg>,
    /// Cap on scheduled gradient calls; `inf` disables it.
    #[arg(long)]
    budget_cap: Option<f64>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated problem families.
    #[arg(long, value_delimiter = ',', default_values_t = ["scalar-remark54".to_string(), "strongly-concave-toy".to_string()])]
    problems: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [0u64])]
    seeds: Vec<u64>,
    /// Comma-separated tolerances, used for both players.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05])]
    tolerances: Vec<f64>,
    /// Problem dimension.
    #[arg(long, default_value_t = 5)]
    d: usize,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "minmax-fne-out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "adaptive")]
    termination: TerminationArg,
    #[arg(long, value_enum, default_value = "step")]
    select: SelectArg,
    #[arg(long)]
    budget_cap: Option<f64>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Trace CSV written by `solve`.
    #[arg(long)]
    trace: PathBuf,
    /// SVG path; defaults to the trace path with an `.svg` extension.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    title: Option<String>,
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("MINMAX_FNE_LOG", "error");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parses `argv` (including the program name), runs the subcommand and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            if code == EXIT_CONFIG && e.to_string().starts_with("invalid argument: config") {
                eprintln!("configuration schema:\n{CONFIG_SCHEMA}");
            }
            code
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::Precondition(_) => EXIT_CONFIG,
        Error::BudgetTooLarge { .. } => EXIT_BUDGET,
        _ => EXIT_FAILURE,
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Schedule(args) => schedule(&args),
        Command::Solve(args) => solve(&args),
        Command::Check => check(),
        Command::Bench(args) => bench(&args),
        Command::Plot(args) => plot(&args),
        Command::Schema => {
            println!("{CONFIG_SCHEMA}");
            Ok(EXIT_OK)
        }
    }
}

/// Config file (or defaults) with command-line flags applied on top.
fn resolve_config(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &args.problem {
        cfg.problem.name = p.clone();
    }
    if let Some(dir) = &args.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(seed) = args.seed {
        cfg.problem.seed = seed;
    }
    if let Some(e) = args.eps_x {
        cfg.eps_x = e;
    }
    if let Some(e) = args.eps_y {
        cfg.eps_y = e;
    }
    if let Some(m) = args.mode {
        cfg.mode = match m {
            ModeArg::Concave => ModeChoice::Concave,
            ModeArg::StronglyConcave => ModeChoice::StronglyConcave,
        };
    }
    if let Some(t) = args.termination {
        cfg.termination = t.into();
    }
    if let Some(s) = args.select {
        cfg.selection = s.into();
    }
    if let Some(cap) = args.budget_cap {
        cfg.budget_cap = Some(cap);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn schedule(args: &RunArgs) -> Result<i32> {
    let cfg = resolve_config(args)?;
    let inst = build_problem(&cfg.problem.name, cfg.problem.seed, &cfg.problem.dims)?;
    let options = cfg.search_options(&inst)?;
    let cap = options.budget_cap;
    let sched = plan(&inst.spec, cfg.eps_x, cfg.eps_y, &SearchOptions { budget_cap: f64::INFINITY, ..options })?;
    let (t_x, t_y) = complexity_factors(&inst.spec, cfg.eps_x, cfg.eps_y)?;
    let doc = json!({
        "problem": cfg.problem,
        "eps_x": cfg.eps_x,
        "eps_y": cfg.eps_y,
        "schedule": sched,
        "complexity_factors": { "T_x": t_x, "T_y": t_y },
        "budget_cap": if cap.is_finite() { json!(cap) } else { json!("inf") },
        "within_cap": sched.budget.grad <= cap,
    });
    println!("{}", serde_json::to_string_pretty(&doc).map_err(|e| Error::Internal(e.to_string()))?);
    Ok(EXIT_OK)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

fn solve(args: &RunArgs) -> Result<i32> {
    let cfg = resolve_config(args)?;
    let inst = build_problem(&cfg.problem.name, cfg.problem.seed, &cfg.problem.dims)?;
    let options = cfg.search_options(&inst)?;
    info!("solve {} seed {} eps ({}, {})", inst.name, inst.seed, cfg.eps_x, cfg.eps_y);
    let start = Instant::now();
    let outcome = fne_search(&inst.spec, cfg.eps_x, cfg.eps_y, &options)?;
    let summary = RunSummary::from_outcome(&outcome, start.elapsed().as_secs_f64());
    create_dir(&cfg.output.dir)?;
    write_trace_csv(&cfg.output.trace_path(), &outcome.trace.rows)?;
    write_summary_json(&cfg.output.summary_path(), &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| Error::Internal(e.to_string()))?);
    Ok(if summary.status == SolveStatus::BudgetExceeded { EXIT_BUDGET } else { EXIT_OK })
}

fn check() -> Result<i32> {
    let results = run_checks();
    let mut out = std::io::stdout().lock();
    for r in &results {
        let _ = writeln!(out, "{} {} ({})", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("failed checks: {}", failed.join(", "));
        Ok(EXIT_FAILURE)
    }
}

fn bench(args: &BenchArgs) -> Result<i32> {
    for p in &args.problems {
        if !FAMILIES.contains(&p.as_str()) {
            return Err(Error::InvalidArgument(format!("unknown problem '{p}'; expected one of {FAMILIES:?}")));
        }
    }
    let dims = ProblemDims { d: args.d, ..ProblemDims::default() };
    let problems: Vec<(String, ProblemDims)> = args.problems.iter().map(|p| (p.clone(), dims)).collect();
    let cases = sweep(&problems, &args.seeds, &args.tolerances);
    let base = SearchOptions {
        termination: args.termination.into(),
        selection: args.select.into(),
        budget_cap: args.budget_cap.unwrap_or(SearchOptions::default().budget_cap),
        ..SearchOptions::default()
    };
    let threads = args.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let rows = run_bench(&cases, &base, threads)?;
    create_dir(&args.out)?;
    let path = args.out.join("bench.csv");
    write_bench_csv(&path, &rows)?;
    for r in &rows {
        println!(
            "{:<22} seed {:<3} eps {:<8} {:<16} tau {:<5} S_x {:.3e} S_y {:.3e} grads {}",
            r.problem, r.seed, r.eps_x, r.status, r.tau, r.s_x, r.s_y, r.grad_calls
        );
    }
    println!("wrote {}", path.display());
    let exceeded = rows.iter().any(|r| r.status == "budget-exceeded");
    Ok(if exceeded { EXIT_BUDGET } else { EXIT_OK })
}

fn plot(args: &PlotArgs) -> Result<i32> {
    let rows = read_trace_csv(&args.trace)?;
    let out = args.out.clone().unwrap_or_else(|| args.trace.with_extension("svg"));
    let title = args.title.clone().unwrap_or_else(|| args.trace.display().to_string());
    write_trace_svg(&rows, &title, &out)?;
    println!("wrote {}", out.display());
    Ok(EXIT_OK)
}
