// Inspect the iteration schedule and oracle budget before committing to a solve.

use std::error::Error;

use minmax_fne::harness::{build_problem, ProblemDims};
use minmax_fne::saddle::{complexity_factors, compute_schedule, DualMode};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let inst = build_problem("max-of-quadratics", 7, &ProblemDims { d: 10, ..ProblemDims::default() })?;
    let c = inst.spec.constants();
    println!("L_xx {:.3} L_xy {:.3} L_yy {:.3} R_y {:.3} Delta {:.3}", c.l_xx, c.l_xy, c.l_yy, c.r_y, c.delta);

    for eps in [0.2, 0.1, 0.05] {
        let s = compute_schedule(&inst.spec, eps, eps, DualMode::Concave)?;
        let (t_x, t_y) = complexity_factors(&inst.spec, eps, eps)?;
        println!(
            "eps {eps:<5} Tbar_x {:>6} Tbar_y {:>3} S_y {:>3} T_o {} S_o {:>3}  budget {:.2e} grads  (T_x {t_x:.0}, T_y {t_y:.1})",
            s.tbar_x, s.tbar_y, s.s_y, s.t_o, s.s_o, s.budget.grad
        );
        assert_eq!(s.t_o, 11);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
