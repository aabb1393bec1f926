// A small benchmark sweep run on worker threads, written to an aggregate CSV.

use std::error::Error;

use minmax_fne::harness::bench::{run_bench, sweep, write_bench_csv};
use minmax_fne::harness::ProblemDims;
use minmax_fne::saddle::{SearchOptions, Termination};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let problems = vec![
        ("scalar-remark54".to_string(), ProblemDims::default()),
        ("strongly-concave-toy".to_string(), ProblemDims { d: 3, ..ProblemDims::default() }),
    ];
    let cases = sweep(&problems, &[0, 1], &[0.1, 0.05]);
    let base = SearchOptions { termination: Termination::Adaptive, ..SearchOptions::default() };
    let rows = run_bench(&cases, &base, 4)?;
    for r in &rows {
        println!(
            "{:<22} seed {} eps {:<5} {:<10} outer {:>3} S_x {:.2e} S_y {:.2e} grads {:>9}",
            r.problem, r.seed, r.eps_x, r.status, r.outer_iterations, r.s_x, r.s_y, r.grad_calls
        );
    }
    let path = std::env::temp_dir().join("minmax-fne-bench-example.csv");
    write_bench_csv(&path, &rows)?;
    println!("wrote {}", path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
