//! Sweeps over problems and tolerances with independent, concurrently dispatched solves.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::harness::problems::{build_problem, ProblemDims};
use crate::saddle::{fne_search, DualMode, SearchOptions, SolveStatus, Termination};

/// One solve of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCase {
    pub problem: String,
    pub dims: ProblemDims,
    pub seed: u64,
    pub eps_x: f64,
    pub eps_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub problem: String,
    pub d: usize,
    pub seed: u64,
    pub eps_x: f64,
    pub eps_y: f64,
    pub mode: String,
    pub status: String,
    pub outer_iterations: usize,
    pub tbar_x: usize,
    pub tau: usize,
    #[serde(rename = "S_x")]
    pub s_x: f64,
    #[serde(rename = "S_y")]
    pub s_y: f64,
    pub verdict: bool,
    pub grad_calls: u64,
    pub proj_calls: u64,
    pub budget: f64,
    pub wall_seconds: f64,
}

/// Cartesian product of problems, seeds and tolerances (with `eps_y = eps_x`).
pub fn sweep(problems: &[(String, ProblemDims)], seeds: &[u64], tolerances: &[f64]) -> Vec<BenchCase> {
    let mut out = Vec::new();
    for (name, dims) in problems {
        for &seed in seeds {
            for &eps in tolerances {
                out.push(BenchCase { problem: name.clone(), dims: *dims, seed, eps_x: eps, eps_y: eps });
            }
        }
    }
    out
}

/// Runs one case. Families with a strong concavity modulus use it; others run in concave mode.
pub fn run_case(case: &BenchCase, base: &SearchOptions) -> Result<BenchRow> {
    let inst = build_problem(&case.problem, case.seed, &case.dims)?;
    let mut options = base.clone();
    options.mode = match inst.strong_concavity {
        Some(lambda_y) => DualMode::StronglyConcave { lambda_y },
        None => DualMode::Concave,
    };
    let start = Instant::now();
    let out = fne_search(&inst.spec, case.eps_x, case.eps_y, &options)?;
    let wall = start.elapsed().as_secs_f64();
    let row = &out.trace.rows[out.trace.tau - 1];
    Ok(BenchRow {
        problem: case.problem.clone(),
        d: case.dims.d,
        seed: case.seed,
        eps_x: case.eps_x,
        eps_y: case.eps_y,
        mode: match options.mode {
            DualMode::Concave => "concave".into(),
            DualMode::StronglyConcave { .. } => "strongly-concave".into(),
        },
        status: match out.trace.status {
            SolveStatus::Completed => "completed",
            SolveStatus::Converged => "converged",
            SolveStatus::BudgetExceeded => "budget-exceeded",
        }
        .into(),
        outer_iterations: out.trace.rows.len(),
        tbar_x: out.schedule.tbar_x,
        tau: out.trace.tau,
        s_x: row.s_x,
        s_y: row.s_y,
        verdict: out.trace.verdict,
        grad_calls: out.counts.grad,
        proj_calls: out.counts.proj,
        budget: out.schedule.budget.grad,
        wall_seconds: wall,
    })
}

/// Runs every case on up to `threads` workers; rows come back in case order.
pub fn run_bench(cases: &[BenchCase], base: &SearchOptions, threads: usize) -> Result<Vec<BenchRow>> {
    if threads == 0 {
        return Err(invalid("bench needs at least one thread"));
    }
    if base.termination != Termination::Adaptive {
        info!("bench in fixed mode runs every scheduled outer iteration");
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<BenchRow>>>> = Mutex::new(vec![None; cases.len()]);
    std::thread::scope(|scope| {
        for _ in 0..threads.min(cases.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= cases.len() {
                    break;
                }
                let r = run_case(&cases[i], base);
                info!("bench case {i} ({} eps {}) done", cases[i].problem, cases[i].eps_x);
                results.lock().expect("bench result lock")[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .map_err(|_| Error::Internal("bench worker panicked".into()))?
        .into_iter()
        .map(|r| r.unwrap_or_else(|| Err(Error::Internal("bench case did not run".into()))))
        .collect()
}

pub fn write_bench_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
