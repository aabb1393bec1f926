// Strong and weak stationarity measures, including the one-dimensional family where they differ.

use std::error::Error;

use minmax_fne::harness::{build_problem, ProblemDims};
use minmax_fne::stationarity::{fne_check, measures};
use minmax_fne::{FeasibleSet, VectorPoint};
use nalgebra::dvector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // Maximize -(y - a)^2 / 2 over [-1, 0] from y = -eps: the weak measure sees only eps,
    // the strong measure also sees the pull a toward the boundary.
    let set = FeasibleSet::boxed(dvector![-1.0], dvector![0.0])?;
    for a in [0.5, 2.0, 10.0] {
        let eps = 0.1;
        let y = dvector![-eps];
        let zeta = dvector![y[0] - a];
        let r = measures(&y, &zeta, 1.0, &set)?;
        println!("a {a:<4}  S {:.4} (sqrt(2a eps + eps^2) = {:.4})  W {:.4}", r.strong, (2.0 * a * eps + eps * eps).sqrt(), r.weak);
    }

    let inst = build_problem("quad-bilinear", 1, &ProblemDims::default())?;
    let x: VectorPoint = inst.spec.x0().clone();
    let y: VectorPoint = inst.spec.y_bar().clone();
    let v = fne_check(&x, &y, &inst.spec, 0.1, 0.1)?;
    println!("quad-bilinear start point: S_x {:.3e}, S_y {:.3e}, (0.1, 0.1)-FNE: {}", v.x.strong, v.y.strong, v.passed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
