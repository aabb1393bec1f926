// Persist a solve as trace CSV and summary JSON, read it back, and render an SVG plot.

use std::error::Error;
use std::time::Instant;

use minmax_fne::harness::plot::write_trace_svg;
use minmax_fne::harness::trace_io::{read_trace_csv, write_summary_json, write_trace_csv, RunSummary};
use minmax_fne::harness::{build_problem, ProblemDims};
use minmax_fne::saddle::{fne_search, SearchOptions, Selection, Termination};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let inst = build_problem("max-of-quadratics", 2, &ProblemDims { d: 4, k: 3, ..ProblemDims::default() })?;
    let options = SearchOptions {
        termination: Termination::Adaptive,
        selection: Selection::GradNorm,
        ..SearchOptions::default()
    };
    let start = Instant::now();
    let out = fne_search(&inst.spec, 0.1, 0.1, &options)?;
    let summary = RunSummary::from_outcome(&out, start.elapsed().as_secs_f64());

    let dir = std::env::temp_dir().join("minmax-fne-trace-example");
    std::fs::create_dir_all(&dir)?;
    let trace = dir.join("trace.csv");
    write_trace_csv(&trace, &out.trace.rows)?;
    write_summary_json(&dir.join("summary.json"), &summary)?;
    let rows = read_trace_csv(&trace)?;
    assert_eq!(rows, out.trace.rows);
    write_trace_svg(&rows, "max-of-quadratics d=4", &dir.join("trace.svg"))?;
    println!("{:?}: {} rows, tau {}, {} gradient calls", summary.status, rows.len(), summary.tau, summary.grad_calls);
    println!("wrote {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
