// Solve a strongly concave toy problem and compare with its closed-form saddle point.

use std::error::Error;

use minmax_fne::harness::{build_problem, ProblemDims};
use minmax_fne::saddle::{fne_search, DualMode, SearchOptions, Termination};
use minmax_fne::stationarity::fne_check;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let inst = build_problem("strongly-concave-toy", 3, &ProblemDims::default())?;
    let lambda_y = inst.strong_concavity.ok_or("toy family is strongly concave")?;
    let options = SearchOptions {
        mode: DualMode::StronglyConcave { lambda_y },
        termination: Termination::Adaptive,
        ..SearchOptions::default()
    };
    let (eps_x, eps_y) = (0.05, 0.05);
    let out = fne_search(&inst.spec, eps_x, eps_y, &options)?;

    for row in out.trace.rows.iter().take(5) {
        println!("t {:>3}  S_x {:.3e}  S_y {:.3e}  grads {}", row.outer_t, row.s_x, row.s_y, row.grad_calls_cum);
    }
    println!("status {:?} after {} outer iterations, {} gradient calls", out.trace.status, out.trace.rows.len(), out.counts.grad);

    let verdict = fne_check(&out.x, &out.y, &inst.spec, 2.0 * eps_x, 5.0 * eps_y)?;
    println!("FNE check at (2 eps_x, 5 eps_y): {} (S_x {:.2e}, S_y {:.2e})", verdict.passed, verdict.x.strong, verdict.y.strong);
    if let Some(known) = &inst.known_solution {
        println!("distance to saddle: x {:.2e}, y {:.2e}", (&out.x - &known.x).norm(), (&out.y - &known.y).norm());
    }
    assert!(verdict.passed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
